//! Log-log least squares for decay exponents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::PowerSeries;
use crate::spectrum::{Method, Parity, Spectrum};

/// Quadrature entries below this fraction of the largest same-parity magnitude
/// count as zero. Series and closed-form entries are sums of exact terms and
/// only need to be positive.
pub const ZERO_RELATIVE: f64 = 1e-13;
const MIN_POINTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub parity: Parity,
    pub k_range: (usize, usize),
    pub points: usize,
}

/// Unweighted least-squares line through `(ln x, ln y)`: `(slope, intercept, r²)`.
pub fn fit_log_log(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    (slope, intercept, r2)
}

fn fit_points(values: &[f64], parity: Parity, lo: usize, hi: usize, magnitude: bool, noisy: bool) -> Result<FitResult> {
    let peak = values
        .iter()
        .enumerate()
        .filter(|(k, _)| parity.matches(*k))
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max);
    let floor = if noisy { ZERO_RELATIVE * peak } else { 0.0 };
    let (xs, ys): (Vec<f64>, Vec<f64>) = (lo..=hi.min(values.len().saturating_sub(1)))
        .filter(|&k| k > 0 && parity.matches(k))
        .map(|k| (k as f64, if magnitude { values[k].abs() } else { values[k] }))
        .filter(|(_, v)| *v > floor && *v > 0.0)
        .unzip();
    if xs.len() < MIN_POINTS {
        return Err(Error::Fit { needed: MIN_POINTS, found: xs.len() });
    }
    let (slope, intercept, r_squared) = fit_log_log(&xs, &ys);
    Ok(FitResult { slope, intercept, r_squared, parity, k_range: (lo, hi), points: xs.len() })
}

/// Fitted exponent of `μ_k` over same-parity `k ∈ [k_min, k_max]`.
///
/// Fails with [`Error::Fit`] when fewer than five entries are positive, which
/// signals a vanishing parity class.
pub fn fit_decay(spectrum: &Spectrum, parity: Parity, k_min: usize, k_max: usize) -> Result<FitResult> {
    fit_points(&spectrum.mu, parity, k_min, k_max, false, spectrum.method == Method::Quadrature)
}

/// Fitted exponent of the Taylor coefficients `|b_n|` over same-parity `n ∈ [n_min, n_max]`.
pub fn taylor_decay(series: &PowerSeries, parity: Parity, n_min: usize, n_max: usize) -> Result<FitResult> {
    fit_points(&series.coeffs, parity, n_min, n_max, true, true)
}
