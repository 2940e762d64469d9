//! Legendre (Gegenbauer) polynomials in dimension `d`, normalized so that
//! `P_k(1) = 1`, and the harmonic-space bookkeeping around them.

use crate::error::{Error, Result};
use crate::sphharm::gamma::surface_area;

/// Slack allowed on `|t| <= 1` before an argument is rejected; inner products
/// of unit vectors routinely overshoot by a few ulps.
pub const UNIT_SLACK: f64 = 1e-12;

/// Ambient dimension together with the two sphere areas every projection uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereGeometry {
    pub d: usize,
    /// ω_{d-1}, area of S^{d-1}.
    pub omega_d1: f64,
    /// ω_{d-2}, area of S^{d-2}.
    pub omega_d2: f64,
}

impl SphereGeometry {
    pub fn new(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(SphereGeometry {
            d,
            omega_d1: surface_area(d)?,
            omega_d2: surface_area(d - 1)?,
        })
    }

    /// ω_{d-2} / ω_{d-1}: turns a weighted integral over [-1, 1] into an
    /// average over the sphere.
    pub fn projection_factor(&self) -> f64 {
        self.omega_d2 / self.omega_d1
    }

    /// Exponent `(d - 3) / 2` of the weight `(1 - t²)^{(d-3)/2}`.
    pub fn weight_exponent(&self) -> f64 {
        (self.d as f64 - 3.0) / 2.0
    }
}

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if d < 3 {
        return Err(Error::Domain(format!("dimension d must be >= 3, got {d}")));
    }
    Ok(())
}

/// Number of linearly independent spherical harmonics of degree `k` on S^{d-1}:
/// ```text
/// N(d, 0) = 1,   N(d, k) = (2k + d - 2) / k * C(k + d - 3, d - 2)
/// ```
pub fn n_harmonics(d: usize, k: usize) -> Result<u64> {
    check_dim(d)?;
    if k == 0 {
        return Ok(1);
    }
    // C(k + d - 3, d - 2), built incrementally so each partial product is exact.
    let n = (k + d - 3) as u128;
    let r = (d - 2) as u128;
    let mut binom: u128 = 1;
    for i in 0..r {
        binom = binom * (n - i) / (i + 1);
    }
    let total = binom * (2 * k + d - 2) as u128 / k as u128;
    u64::try_from(total).map_err(|_| Error::Domain(format!("N({d}, {k}) overflows u64")))
}

/// `N(d, k)` as a float, for use inside sums.
pub fn n_harmonics_f64(d: usize, k: usize) -> f64 {
    n_harmonics(d, k).map(|n| n as f64).unwrap_or(f64::INFINITY)
}

fn check_unit(t: f64) -> Result<f64> {
    if !t.is_finite() || t.abs() > 1.0 + UNIT_SLACK {
        return Err(Error::Domain(format!("|t| <= 1 required, got {t}")));
    }
    Ok(t.clamp(-1.0, 1.0))
}

/// Fill `out[k] = P_k(t)` for `k = 0..out.len()`.
///
/// Forward recurrence
/// ```text
/// P_{k+1}(t) = ((2k + d - 2) t P_k(t) - k P_{k-1}(t)) / (k + d - 2)
/// ```
/// seeded with `P_0 = 1`, `P_1 = t`. The argument is not range checked.
pub fn legendre_fill(d: usize, t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = t;
    let dm2 = d as f64 - 2.0;
    for k in 1..out.len() - 1 {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + dm2) * t * out[k] - kf * out[k - 1]) / (kf + dm2);
    }
}

/// `P_0(t), ..., P_{k_max}(t)` in dimension `d`.
pub fn legendre_batch(d: usize, k_max: usize, t: f64) -> Result<Vec<f64>> {
    check_dim(d)?;
    let t = check_unit(t)?;
    let mut out = vec![0.0; k_max + 1];
    legendre_fill(d, t, &mut out);
    Ok(out)
}

/// `∫ P_k(t)² (1 - t²)^{(d-3)/2} dt = ω_{d-1} / (ω_{d-2} N(d, k))`.
pub fn legendre_norm_sq(d: usize, k: usize) -> Result<f64> {
    let geom = SphereGeometry::new(d)?;
    Ok(1.0 / (geom.projection_factor() * n_harmonics(d, k)? as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn harmonic_counts() {
        assert_eq!(n_harmonics(3, 0).unwrap(), 1);
        assert_eq!(n_harmonics(3, 5).unwrap(), 11);
        assert_eq!(n_harmonics(4, 2).unwrap(), 9);
        assert_eq!(n_harmonics(4, 1).unwrap(), 4);
        // d = 4: N = (k + 1)^2
        for k in 0..50 {
            assert_eq!(n_harmonics(4, k).unwrap(), ((k + 1) * (k + 1)) as u64);
        }
        // d = 3: N = 2k + 1
        for k in 0..200 {
            assert_eq!(n_harmonics(3, k).unwrap(), (2 * k + 1) as u64);
        }
        assert!(n_harmonics(2, 3).is_err());
    }

    #[test]
    fn small_degree_values() {
        let p = legendre_batch(3, 2, 0.5).unwrap();
        assert_eq!(p[1], 0.5);
        assert!((p[2] + 0.125).abs() < 1e-15);
        for d in 3..8 {
            let p = legendre_batch(d, 60, 1.0).unwrap();
            assert!(p.iter().all(|&v| (v - 1.0).abs() < 1e-10));
        }
    }

    #[test]
    fn chebyshev_second_kind_in_four_dimensions() {
        // d = 4: P_k(cos θ) = sin((k+1)θ) / ((k+1) sin θ)
        let theta: f64 = 0.7;
        let p = legendre_batch(4, 30, theta.cos()).unwrap();
        for (k, v) in p.iter().enumerate() {
            let kk = (k + 1) as f64;
            let expected = (kk * theta).sin() / (kk * theta.sin());
            assert!((v - expected).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(legendre_batch(3, 4, 1.1).is_err());
        assert!(legendre_batch(3, 4, 1.0 + 1e-14).is_ok());
        assert!(legendre_batch(3, 4, f64::NAN).is_err());
    }

    #[test]
    fn norms() {
        assert!((legendre_norm_sq(3, 0).unwrap() - 2.0).abs() < 1e-14);
        assert!((legendre_norm_sq(3, 1).unwrap() - 2.0 / 3.0).abs() < 1e-14);
        // ω_3 / ω_2 = 2π² / 4π = π / 2
        assert!((legendre_norm_sq(4, 2).unwrap() - PI / 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn geometry() {
        let g = SphereGeometry::new(3).unwrap();
        assert!((g.projection_factor() - 0.5).abs() < 1e-15);
        assert_eq!(g.weight_exponent(), 0.0);
        assert!(SphereGeometry::new(2).is_err());
    }
}
