//! The two routes to `μ_k`.
//!
//! Series route: with `κ(u) = Σ b_n u^n`,
//! ```text
//! μ_k = Σ_n b_n λ[n][k]
//! ```
//! a sum of nonnegative terms that keeps full relative accuracy for tiny `μ_k`.
//! The truncated tail `n > N` is added back from the large-`n` law of the
//! coefficients, `b_n ≈ Σ_j A_j n^{-(ν+1)-j/p}` per parity class, fitted on
//! `[N/2, N]`.
//!
//! Quadrature route: the defining integral on the desingularized rule, with
//! the even and odd parts of `κ` split over mirrored nodes so that parity
//! cancellations are exact.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernels::{endpoint_expansion, eval_arg, kernel_series, KernelSpec, DEFAULT_SERIES_ORDER};
use crate::spectrum::{Method, Route, Spectrum, Truncation};
use crate::sphharm::{
    desingularized_rule, legendre_fill, monomial_diagonal, monomial_projection_step, DotArg, NeumaierSum,
    SphereGeometry,
};

/// Settings shared by both routes.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumOptions {
    pub series_order: usize,
    /// Per-half node count; `None` picks [`default_nodes`].
    pub nodes_per_half: Option<usize>,
    pub tail_completion: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { series_order: DEFAULT_SERIES_ORDER, nodes_per_half: None, tail_completion: true }
    }
}

/// `max(256, 4 k_max)` nodes per half, scaled by `p/2` for substitution powers
/// `p > 2` (the map `t = 1 - s^p` stretches node spacing near `t = 0` by `p`).
pub fn default_nodes(k_max: usize, power: u32) -> usize {
    256usize.max(4 * k_max) * (power as usize / 2).max(1)
}

/// Dispatch on the requested route.
pub fn compute_spectrum(spec: &KernelSpec, d: usize, k_max: usize, route: Route, opts: &SpectrumOptions) -> Result<Spectrum> {
    match route {
        Route::Series => mu_series(spec, d, k_max, opts.series_order, opts.tail_completion),
        Route::Quadrature => mu_quadrature(spec, d, k_max, opts.nodes_per_half),
        Route::Auto => {
            if spec.is_series_capable() {
                mu_series(spec, d, k_max, opts.series_order, opts.tail_completion)
            } else {
                mu_quadrature(spec, d, k_max, opts.nodes_per_half)
            }
        }
    }
}

/// `μ_k` by quadrature on the desingularized rule matched to the kernel's
/// endpoint exponent.
pub fn mu_quadrature(spec: &KernelSpec, d: usize, k_max: usize, nodes_per_half: Option<usize>) -> Result<Spectrum> {
    spec.validate()?;
    let power = endpoint_expansion(spec).map(|e| e.substitution_power()).unwrap_or(2);
    let n_half = nodes_per_half.unwrap_or_else(|| default_nodes(k_max, power));
    let mu = mu_quadrature_fn(d, k_max, n_half, power, |a| eval_arg(spec, a))?;
    Ok(Spectrum {
        d,
        mu,
        method: Method::Quadrature,
        kernel: spec.to_string(),
        truncation: Truncation { nodes_per_half: Some(n_half), substitution_power: Some(power), ..Default::default() },
    })
}

/// `(ω_{d-2}/ω_{d-1}) ∫ f(t) P_k(t) (1 - t²)^{(d-3)/2} dt` for `k = 0..=k_max`
/// on the `t = ±(1 - s^power)` rule with `n_half` nodes per side.
pub fn mu_quadrature_fn<F: FnMut(&DotArg) -> f64>(
    d: usize,
    k_max: usize,
    n_half: usize,
    power: u32,
    mut f: F,
) -> Result<Vec<f64>> {
    let geom = SphereGeometry::new(d)?;
    let rule = desingularized_rule(d, n_half, power)?;
    let n = rule.len();
    let mut acc = vec![NeumaierSum::default(); k_max + 1];
    let mut p = vec![0.0; k_max + 1];
    for i in 0..n_half {
        let left = &rule.args[i];
        let right = &rule.args[n - 1 - i];
        let w = rule.weights[i];
        let (fr, fl) = (f(right), f(left));
        let even = w * (fr + fl);
        let odd = w * (fr - fl);
        legendre_fill(d, right.u, &mut p);
        for (k, (a, pk)) in acc.iter_mut().zip(&p).enumerate() {
            a.add(if k % 2 == 0 { even } else { odd } * pk);
        }
    }
    let scale = geom.projection_factor();
    Ok(acc.iter().map(|a| scale * a.total()).collect())
}

/// Upper limit of the explicit tail sum; beyond it an integral is used.
const TAIL_EXPLICIT_LIMIT: usize = 1 << 20;
const TAIL_TERMS: usize = 6;

/// Large-`n` model `b_n ≈ Σ_j A_j n^{-ρ_j}` for one parity class.
struct TailModel {
    exponents: Vec<f64>,
    coeffs: Vec<f64>,
}

impl TailModel {
    fn eval(&self, n: f64) -> f64 {
        self.exponents.iter().zip(&self.coeffs).map(|(r, a)| a * n.powf(-r)).sum()
    }

    /// Relative least-squares fit on the same-parity `n ∈ [N/2, N]`.
    fn fit(b: &[f64], parity: usize, nu: f64, power: u32) -> Option<TailModel> {
        let n_max = b.len() - 1;
        let pts: Vec<usize> = (n_max / 2..=n_max).filter(|n| n % 2 == parity && b[*n] != 0.0).collect();
        if pts.len() < 4 * TAIL_TERMS {
            return None;
        }
        let exponents: Vec<f64> = (0..TAIL_TERMS).map(|j| nu + 1.0 + j as f64 / power as f64).collect();
        let scale: Vec<f64> = exponents.iter().map(|r| (n_max as f64).powf(*r)).collect();
        let mut a = DMatrix::<f64>::zeros(pts.len(), TAIL_TERMS);
        let rhs = DVector::<f64>::from_element(pts.len(), 1.0);
        for (row, &n) in pts.iter().enumerate() {
            let nf = n as f64;
            for j in 0..TAIL_TERMS {
                a[(row, j)] = nf.powf(-exponents[j]) * scale[j] / b[n];
            }
        }
        let sol = a.svd(true, true).solve(&rhs, 1e-14).ok()?;
        let coeffs = (0..TAIL_TERMS).map(|j| sol[j] * scale[j]).collect();
        Some(TailModel { exponents, coeffs })
    }

    /// `Σ_{n > start, n ≡ start mod 2} b̂_n` weighted by `λ[n][k]`, given
    /// `λ[start][k]`; explicit to [`TAIL_EXPLICIT_LIMIT`], then by the
    /// `λ[n][k] ∝ n^{-(d-1)/2}` integral.
    fn tail_sum(&self, values: &[f64], d: usize, k: usize, start: usize, mut lambda: f64) -> f64 {
        let mut acc = NeumaierSum::default();
        let mut n = start;
        for &bh in values {
            lambda *= monomial_projection_step(d, n, k);
            n += 2;
            acc.add(bh * lambda);
        }
        let a = (d as f64 - 1.0) / 2.0;
        let m = n as f64;
        let rest: f64 = self
            .exponents
            .iter()
            .zip(&self.coeffs)
            .map(|(r, c)| c * m.powf(1.0 - r - a) / (2.0 * (r + a - 1.0)))
            .sum();
        acc.total() + lambda * m.powf(a) * rest
    }
}

/// `μ_k = Σ_n b_n λ[n][k]` from the order-`n_max` Taylor series.
pub fn mu_series(spec: &KernelSpec, d: usize, k_max: usize, n_max: usize, tail_completion: bool) -> Result<Spectrum> {
    if !spec.is_series_capable() {
        return Err(Error::SeriesUnsupported { family: spec.family().to_string() });
    }
    SphereGeometry::new(d)?;
    if n_max < k_max {
        return Err(Error::Domain(format!("series order {n_max} below k_max {k_max}")));
    }
    let series = kernel_series(spec, n_max)?;
    let b = &series.coeffs;
    let n_top = b.len() - 1;

    let mut models: [Option<TailModel>; 2] = [None, None];
    let mut tails: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    let completing = tail_completion && !spec.is_smooth();
    if completing {
        let e = endpoint_expansion(spec)?;
        let power = e.substitution_power();
        for parity in 0..2 {
            if let Some(model) = TailModel::fit(b, parity, e.nu, power) {
                let first = if (n_top + 1) % 2 == parity { n_top + 1 } else { n_top + 2 };
                tails[parity] = (first..=TAIL_EXPLICIT_LIMIT).step_by(2).map(|n| model.eval(n as f64)).collect();
                models[parity] = Some(model);
            }
        }
    }

    let mut mu = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let mut lambda = monomial_diagonal(d, k);
        let mut acc = NeumaierSum::default();
        let mut n = k;
        loop {
            acc.add(b[n] * lambda);
            if n + 2 > n_top {
                break;
            }
            lambda *= monomial_projection_step(d, n, k);
            n += 2;
        }
        let mut total = acc.total();
        if let Some(model) = &models[k % 2] {
            total += model.tail_sum(&tails[k % 2], d, k, n, lambda);
        }
        mu.push(total);
    }
    Ok(Spectrum {
        d,
        mu,
        method: Method::Series,
        kernel: spec.to_string(),
        truncation: Truncation { series_order: Some(n_max), tail_completion: Some(completing), ..Default::default() },
    })
}
