//! Mercer partial sums and the integration-by-parts identity.

use crate::error::{Error, Result};
use crate::kernels::{eval_smooth_unchecked, KernelSpec};
use crate::spectrum::Spectrum;
use crate::sphharm::{legendre_batch, n_harmonics_f64, plain_rule, NeumaierSum, SphereGeometry};

/// `Σ_{k≤K} μ_k N(d, k) P_k(t)`.
pub fn mercer_reconstruct(spectrum: &Spectrum, t: f64) -> Result<f64> {
    let p = legendre_batch(spectrum.d, spectrum.k_max(), t)?;
    Ok(spectrum
        .mu
        .iter()
        .zip(&p)
        .enumerate()
        .map(|(k, (m, pk))| m * n_harmonics_f64(spectrum.d, k) * pk)
        .collect::<NeumaierSum>()
        .total())
}

/// Running trace `Σ_{k≤K} μ_k N(d, k)` for every `K`.
pub fn trace_partial_sums(spectrum: &Spectrum) -> Vec<f64> {
    let mut acc = NeumaierSum::default();
    spectrum
        .mu
        .iter()
        .enumerate()
        .map(|(k, m)| {
            acc.add(m * n_harmonics_f64(spectrum.d, k));
            acc.total()
        })
        .collect()
}

/// Both sides of
/// ```text
/// ∫ κ P_k w = (1/(k(k+d-2))) ([κ' (1-t²)^{(d-1)/2} P_k]_{-1}^{1} + ∫ κ̃ P_k w),
/// κ̃ = -κ'' (1 - t²) + (d - 1) t κ'
/// ```
/// with `w = (1 - t²)^{(d-3)/2}`, both scaled by `ω_{d-2}/ω_{d-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct IbpCheck {
    pub left: f64,
    pub right: f64,
    pub boundary: f64,
    pub residual: f64,
}

const FD_STEP: f64 = 1e-3;

/// Central differences with one Richardson step: `(4 D(h/2) - D(h)) / 3`.
fn derivatives(f: &impl Fn(f64) -> f64, t: f64) -> (f64, f64) {
    let d1 = |h: f64| (f(t + h) - f(t - h)) / (2.0 * h);
    let d2 = |h: f64| (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
    let h = FD_STEP;
    ((4.0 * d1(h / 2.0) - d1(h)) / 3.0, (4.0 * d2(h / 2.0) - d2(h)) / 3.0)
}

/// Residual of the integration-by-parts identity for a smooth kernel, `k >= 1`.
pub fn ibp_identity_check(spec: &KernelSpec, d: usize, k: usize) -> Result<IbpCheck> {
    let geom = SphereGeometry::new(d)?;
    if !spec.is_smooth() {
        return Err(Error::NotSmooth(spec.to_string()));
    }
    if k == 0 {
        return Err(Error::Domain("identity needs k >= 1".into()));
    }
    let f = |u: f64| eval_smooth_unchecked(spec, u).expect("smooth family");
    let rule = plain_rule(d, 64 + k)?;
    let scale = geom.projection_factor();
    let pk = |t: f64| legendre_batch(d, k, t).map(|p| p[k]).unwrap_or(f64::NAN);
    let left = scale * rule.integrate(|t| f(t) * pk(t));
    let df = (d - 1) as f64;
    let tilde = rule.integrate(|t| {
        let (d1, d2) = derivatives(&f, t);
        (-d2 * (1.0 - t * t) + df * t * d1) * pk(t)
    });
    let edge = |t: f64| {
        let (d1, _) = derivatives(&f, t);
        d1 * (1.0 - t * t).max(0.0).powf(df / 2.0) * pk(t)
    };
    let boundary = edge(1.0) - edge(-1.0);
    let eig = (k * (k + d - 2)) as f64;
    let right = scale * (boundary + tilde) / eig;
    Ok(IbpCheck { left, right, boundary: scale * boundary / eig, residual: (left - right).abs() })
}
