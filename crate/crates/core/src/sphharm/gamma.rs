//! Gamma function on the whole real line, kept in (log |value|, sign) form.
//!
//! Products and quotients of many Gamma factors appear in the closed-form
//! eigenvalues; working in log space avoids overflow for large frequencies,
//! and the explicit sign keeps negative non-integer arguments usable.

use std::f64::consts::PI;
use std::ops::{Div, Mul};

use crate::error::{Error, Result};

/// A real number stored as `sign * exp(log_abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub log_abs: f64,
    pub sign: f64,
}

impl SignedLog {
    pub const ONE: SignedLog = SignedLog { log_abs: 0.0, sign: 1.0 };

    pub fn from_value(x: f64) -> SignedLog {
        SignedLog {
            log_abs: x.abs().ln(),
            sign: if x < 0.0 { -1.0 } else { 1.0 },
        }
    }

    pub fn value(self) -> f64 {
        self.sign * self.log_abs.exp()
    }
}

impl Mul for SignedLog {
    type Output = SignedLog;
    fn mul(self, rhs: SignedLog) -> SignedLog {
        SignedLog {
            log_abs: self.log_abs + rhs.log_abs,
            sign: self.sign * rhs.sign,
        }
    }
}

impl Div for SignedLog {
    type Output = SignedLog;
    fn div(self, rhs: SignedLog) -> SignedLog {
        SignedLog {
            log_abs: self.log_abs - rhs.log_abs,
            sign: self.sign * rhs.sign,
        }
    }
}

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// `log |Γ(x)|` together with the sign of `Γ(x)`.
///
/// Negative arguments go through the reflection formula
/// ```text
/// Γ(x) Γ(1 - x) = π / sin(π x)
/// ```
/// so the sign alternates between consecutive poles. Poles are reported as
/// [`Error::Pole`]; callers with a Gamma in a denominator read that as a
/// vanishing term.
pub fn log_gamma_signed(x: f64) -> Result<SignedLog> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma of {x}")));
    }
    if is_pole(x) {
        return Err(Error::Pole(x));
    }
    if x >= 0.5 {
        let (lg, sign) = libm::lgamma_r(x);
        return Ok(SignedLog {
            log_abs: lg,
            sign: f64::from(sign),
        });
    }
    // Reflection: Γ(x) = π / (sin(πx) Γ(1-x)).
    let s = sin_pi(x);
    let (lg, sign) = libm::lgamma_r(1.0 - x);
    Ok(SignedLog {
        log_abs: PI.ln() - s.abs().ln() - lg,
        sign: s.signum() * f64::from(sign),
    })
}

/// `sin(π x)` with the argument reduced first, exact at integers and halves.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).floor(); // r in [0, 2)
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    if r == 0.5 {
        return 1.0;
    }
    if r == 1.5 {
        return -1.0;
    }
    (PI * r).sin()
}

/// Γ(x) as a plain float.
pub fn gamma(x: f64) -> Result<f64> {
    log_gamma_signed(x).map(SignedLog::value)
}

/// Surface area of the unit sphere S^{p-1} in R^p: `2 π^{p/2} / Γ(p/2)`.
pub fn surface_area(p: usize) -> Result<f64> {
    if p < 1 {
        return Err(Error::Domain(format!("surface_area needs p >= 1, got {p}")));
    }
    let half = p as f64 / 2.0;
    let lg = log_gamma_signed(half)?;
    Ok(2.0 * (half * PI.ln() - lg.log_abs).exp())
}
