//! Eigenvalue spectra of dot-product kernels on the sphere.
//!
//! A dot-product kernel `k(x, y) = κ(xᵀy)` on S^{d-1} is diagonalized by
//! spherical harmonics; its eigenvalue at frequency `k` is
//! ```text
//! μ_k = (ω_{d-2}/ω_{d-1}) ∫ κ(t) P_k(t) (1 - t²)^{(d-3)/2} dt
//! ```
//! with `P_k` the Legendre polynomial of dimension `d`. The crate computes
//! these spectra for the kernels of wide ReLU and step networks (random
//! features and NTK), Laplace-type and Gaussian kernels, predicts their
//! power-law decay from the expansions of `κ` at `±1`, and runs kernel ridge
//! regression experiments on the sphere.
//!
//! * [`sphharm`]: Gamma, Legendre polynomials, quadrature, monomial projections.
//! * [`kernels`]: kernel families, power series, endpoint expansions.
//! * [`spectrum`]: eigenvalues by series projection or quadrature, closed forms, fits.
//! * [`regress`]: Gram matrices, ridge regression, random features, experiments.

pub mod error;
pub mod kernels;
pub mod regress;
pub mod spectrum;
pub mod sphharm;

pub use error::{Error, Result};
pub use kernels::{DecayPrediction, EndpointExpansion, KernelSpec, PowerSeries};
pub use regress::{RfModel, RidgeModel, SphereDataset, TargetSpec};
pub use spectrum::{FitResult, Parity, Route, Spectrum};
pub use sphharm::{DotArg, QuadratureRule, SphereGeometry};
