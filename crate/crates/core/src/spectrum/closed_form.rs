//! Exact eigenvalues of `φ_ν(t) = (1 - t²)^ν` and `t φ_ν(t)`.
//!
//! Expanding `P_k` as a terminating `₂F₁` and integrating termwise gives a
//! `₃F₂` at 1 that Watson's summation closes:
//! ```text
//! μ_k(φ_ν) = (ω_{d-2}/ω_{d-1}) 2^{2ν+d-2} Γ(ν+(d-1)/2)² / Γ(2ν+d-1)
//!          · Γ(1/2) Γ(ν+d/2) Γ((d-1)/2) Γ(ν+1)
//!          / [Γ((1-k)/2) Γ((d+k-1)/2) Γ(ν+k/2+d/2) Γ(ν+1-k/2)]
//! ```
//! The pole of `Γ((1-k)/2)` makes every odd `k` vanish exactly.

use crate::error::{Error, Result};
use crate::sphharm::{log_gamma_signed, SignedLog, SphereGeometry};

fn check_nu(nu: f64) -> Result<()> {
    if !(nu.is_finite() && nu > 0.0) || nu == nu.round() {
        return Err(Error::Domain(format!("nu must be positive and non-integer, got {nu}")));
    }
    Ok(())
}

fn lg(x: f64) -> Result<SignedLog> {
    log_gamma_signed(x)
}

/// `k`-independent prefactor of the even-`k` eigenvalue, as a signed log.
fn prefactor(geom: &SphereGeometry, nu: f64) -> Result<SignedLog> {
    let d = geom.d as f64;
    let log2 = std::f64::consts::LN_2;
    let head = SignedLog::from_value(geom.projection_factor())
        * SignedLog { log_abs: (2.0 * nu + d - 2.0) * log2, sign: 1.0 };
    let g = lg(nu + (d - 1.0) / 2.0)?;
    Ok(head * g * g / lg(2.0 * nu + d - 1.0)? * lg(0.5)? * lg(nu + d / 2.0)? * lg((d - 1.0) / 2.0)? * lg(nu + 1.0)?)
}

fn even_eigenvalue(geom: &SphereGeometry, nu: f64, k: usize, pre: SignedLog) -> Result<f64> {
    debug_assert!(k.is_multiple_of(2));
    let d = geom.d as f64;
    let kf = k as f64;
    let denom = lg((1.0 - kf) / 2.0)? * lg((d + kf - 1.0) / 2.0)? * lg(nu + kf / 2.0 + d / 2.0)? * lg(nu + 1.0 - kf / 2.0)?;
    Ok((pre / denom).value())
}

/// `μ_k(φ_ν)` (`odd_variant = false`, zero for odd `k`) or `μ_k(t φ_ν)`
/// (`odd_variant = true`, zero for even `k`).
///
/// The odd variant uses `t P_k = k/(2k+d-2) P_{k-1} + (k+d-2)/(2k+d-2) P_{k+1}`:
/// ```text
/// μ_k(t φ_ν) = k/(2k+d-2) μ_{k-1}(φ_ν) + (k+d-2)/(2k+d-2) μ_{k+1}(φ_ν)
/// ```
pub fn mu_phi_closed_form(d: usize, nu: f64, k: usize, odd_variant: bool) -> Result<f64> {
    check_nu(nu)?;
    let geom = SphereGeometry::new(d)?;
    let pre = prefactor(&geom, nu)?;
    if !odd_variant {
        if k % 2 == 1 {
            return Ok(0.0);
        }
        return even_eigenvalue(&geom, nu, k, pre);
    }
    if k.is_multiple_of(2) {
        return Ok(0.0);
    }
    let kf = k as f64;
    let dm2 = d as f64 - 2.0;
    let den = 2.0 * kf + dm2;
    Ok(kf / den * even_eigenvalue(&geom, nu, k - 1, pre)? + (kf + dm2) / den * even_eigenvalue(&geom, nu, k + 1, pre)?)
}

/// Constant `C(d, ν)` of the large-`k` law `μ_k(φ_ν) ≈ C(d, ν) k^{-d-2ν+1}` (`k` even).
///
/// Reflecting the `k`-dependent Gammas gives
/// ```text
/// C(d, ν) = 2 · 2^{2ν+d-2} (ω_{d-2}/ω_{d-1}) Γ(ν+(d-1)/2)² / Γ(2ν+d-1)
///         · Γ(ν+d/2) Γ((d-1)/2) Γ(ν+1) / (Γ(-1/2) Γ(ν+2) Γ(-ν-1)) · 2^{d+2ν-1}
/// ```
/// The sign is that of the even eigenvalues for large `k`: negative for
/// `0 < ν < 1`, positive for `1 < ν < 2`, and so on.
pub fn asymptotic_constant(d: usize, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    let geom = SphereGeometry::new(d)?;
    let df = d as f64;
    let log2 = std::f64::consts::LN_2;
    let g = lg(nu + (df - 1.0) / 2.0)?;
    let value = SignedLog::from_value(geom.projection_factor())
        * SignedLog { log_abs: (2.0 * nu + df - 2.0 + df + 2.0 * nu - 1.0 + 1.0) * log2, sign: 1.0 }
        * g
        * g
        / lg(2.0 * nu + df - 1.0)?
        * lg(nu + df / 2.0)?
        * lg((df - 1.0) / 2.0)?
        * lg(nu + 1.0)?
        / lg(-0.5)?
        / lg(nu + 2.0)?
        / lg(-nu - 1.0)?;
    Ok(value.value())
}
