//! Normalized projections of monomials onto Legendre polynomials:
//! ```text
//! λ[n][k] = (ω_{d-2}/ω_{d-1}) ∫ t^n P_k(t) (1 - t²)^{(d-3)/2} dt
//! ```
//! so that `t^n = Σ_k λ[n][k] N(d, k) P_k(t)`.

use crate::error::{Error, Result};
use crate::sphharm::gamma::log_gamma_signed;
use crate::sphharm::legendre::check_dim;

/// Rows `n = 0..=n_max`, columns `k = 0..=k_max`.
#[derive(Debug, Clone)]
pub struct MonomialLegendreTable {
    pub d: usize,
    pub n_max: usize,
    pub k_max: usize,
    values: Vec<f64>,
}

impl MonomialLegendreTable {
    pub fn get(&self, n: usize, k: usize) -> f64 {
        if n > self.n_max || k > self.k_max {
            return 0.0;
        }
        self.values[n * (self.k_max + 1) + k]
    }

    pub fn row(&self, n: usize) -> &[f64] {
        let w = self.k_max + 1;
        &self.values[n * w..(n + 1) * w]
    }
}

/// Build the table from the three-term action of multiplication by `t`:
/// ```text
/// λ[n+1][k] = k/(2k+d-2) λ[n][k-1] + (k+d-2)/(2k+d-2) λ[n][k+1]
/// ```
/// seeded by `λ[0][0] = 1`. Row `n` is only carried out to the columns that
/// can still influence a stored column `k <= k_max`.
pub fn monomial_legendre_table(d: usize, n_max: usize, k_max: usize) -> Result<MonomialLegendreTable> {
    check_dim(d)?;
    if k_max > n_max {
        return Err(Error::Domain(format!("need n_max >= k_max, got {n_max} < {k_max}")));
    }
    let dm2 = d as f64 - 2.0;
    let width = k_max + 1;
    let mut values = vec![0.0; (n_max + 1) * width];
    // Working row, wide enough for every column that feeds back into k <= k_max.
    let full = n_max + 2;
    let mut cur = vec![0.0; full + 1];
    let mut next = vec![0.0; full + 1];
    cur[0] = 1.0;
    values[0] = 1.0;
    for n in 0..n_max {
        let reach = (n + 1).min(k_max + (n_max - n - 1));
        for k in 0..=reach {
            let kf = k as f64;
            let denom = 2.0 * kf + dm2;
            let down = if k > 0 { kf / denom * cur[k - 1] } else { 0.0 };
            let up = (kf + dm2) / denom * cur[k + 1];
            next[k] = down + up;
        }
        for v in next.iter_mut().skip(reach + 1) {
            *v = 0.0;
        }
        std::mem::swap(&mut cur, &mut next);
        let row = &mut values[(n + 1) * width..(n + 2) * width];
        row.copy_from_slice(&cur[..width]);
    }
    Ok(MonomialLegendreTable { d, n_max, k_max, values })
}

/// Closed form of a single entry, valid for `n >= k` with `n - k = 2m` even:
/// ```text
/// λ[n][k] = Γ(d/2)/√π · 2^{-k} · n!/(2m)! · Γ(m + 1/2) / Γ(m + k + d/2)
/// ```
pub fn monomial_projection(d: usize, n: usize, k: usize) -> f64 {
    if k > n || (n - k) % 2 == 1 {
        return 0.0;
    }
    let m = ((n - k) / 2) as f64;
    let lg = |x: f64| log_gamma_signed(x).map(|g| g.log_abs).unwrap_or(f64::NAN);
    let df = d as f64;
    let log = lg(df / 2.0) - 0.5 * std::f64::consts::PI.ln() - k as f64 * std::f64::consts::LN_2
        + lg(n as f64 + 1.0)
        - lg(2.0 * m + 1.0)
        + lg(m + 0.5)
        - lg(m + k as f64 + df / 2.0);
    log.exp()
}

/// Diagonal entry `λ[k][k] = Π_{j=1}^{k} j / (2j + d - 2)`, exact for small `k`.
pub fn monomial_diagonal(d: usize, k: usize) -> f64 {
    if k > 512 {
        return monomial_projection(d, k, k);
    }
    (1..=k).fold(1.0, |acc, j| acc * j as f64 / (2 * j + d - 2) as f64)
}

/// Ratio `λ[n+2][k] / λ[n][k] = (n+1)(n+2) / (4 (m+1) (m+k+d/2))` with `n = k + 2m`.
pub fn monomial_projection_step(d: usize, n: usize, k: usize) -> f64 {
    let m = ((n - k) / 2) as f64;
    let nf = n as f64;
    (nf + 1.0) * (nf + 2.0) / (4.0 * (m + 1.0) * (m + k as f64 + d as f64 / 2.0))
}
