//! Synthetic regression targets on the sphere.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of a target as a function of `s = wᵀx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    /// `f(x) = 1{wᵀx ≥ threshold}`.
    IndicatorCap { threshold: f64 },
    /// ```text
    /// f(x) = e^{-(1 - wᵀx)^{3/2}} + e^{-(1 + wᵀx)^{3/2}}
    /// ```
    DoubleExp,
    /// Polynomial `Σ_j c_j (wᵀx)^j`.
    Custom { coeffs: Vec<f64> },
}

impl TargetKind {
    pub fn eval_dot(&self, s: f64) -> f64 {
        match self {
            TargetKind::IndicatorCap { threshold } => {
                if s >= *threshold {
                    1.0
                } else {
                    0.0
                }
            }
            TargetKind::DoubleExp => {
                let s = s.clamp(-1.0, 1.0);
                (-(1.0 - s).powf(1.5)).exp() + (-(1.0 + s).powf(1.5)).exp()
            }
            TargetKind::Custom { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c),
        }
    }
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetKind::IndicatorCap { threshold } => write!(f, "cap:t={threshold}"),
            TargetKind::DoubleExp => f.write_str("double-exp"),
            TargetKind::Custom { coeffs } => {
                let c: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                write!(f, "poly:c={}", c.join("/"))
            }
        }
    }
}

/// `f1` (alias `cap`, optional `:t=<threshold>`), `f2` (alias `double-exp`),
/// or `poly:c=c0/c1/...`.
impl FromStr for TargetKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<TargetKind> {
        let s = s.trim();
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let value = |key: &str| -> Option<&str> {
            args.split(',').filter_map(|kv| kv.split_once('=')).find(|(k, _)| k.trim() == key).map(|(_, v)| v.trim())
        };
        let bad = |msg: String| Error::Parse(format!("target `{s}`: {msg}"));
        match name.trim() {
            "f1" | "cap" => {
                let threshold = match value("t") {
                    Some(v) => v.parse().map_err(|_| bad(format!("bad threshold `{v}`")))?,
                    None => 0.7,
                };
                Ok(TargetKind::IndicatorCap { threshold })
            }
            "f2" | "double-exp" => Ok(TargetKind::DoubleExp),
            "poly" => {
                let c = value("c").ok_or_else(|| bad("missing c".into()))?;
                let coeffs = c
                    .split('/')
                    .map(|v| v.trim().parse::<f64>().map_err(|_| bad(format!("bad coefficient `{v}`"))))
                    .collect::<Result<Vec<_>>>()?;
                Ok(TargetKind::Custom { coeffs })
            }
            other => Err(bad(format!("unknown target `{other}`"))),
        }
    }
}

/// A target together with its unit direction `w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub kind: TargetKind,
    pub w: Vec<f64>,
}

impl TargetSpec {
    pub fn new(kind: TargetKind, w: Vec<f64>) -> Result<TargetSpec> {
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Data(format!("target direction has norm {norm}, expected 1")));
        }
        Ok(TargetSpec { kind, w })
    }

    /// Direction `w = e₁` in `R^d`.
    pub fn along_first_axis(kind: TargetKind, d: usize) -> Result<TargetSpec> {
        if d == 0 {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        let mut w = vec![0.0; d];
        w[0] = 1.0;
        TargetSpec::new(kind, w)
    }

    pub fn d(&self) -> usize {
        self.w.len()
    }
}

/// Pointwise target values at the rows of `x`.
pub fn target_eval(target: &TargetSpec, x: &[Vec<f64>]) -> Result<Vec<f64>> {
    x.iter()
        .map(|row| {
            if row.len() != target.d() {
                return Err(Error::DimensionMismatch { expected: target.d(), found: row.len() });
            }
            let s: f64 = row.iter().zip(&target.w).map(|(a, b)| a * b).sum();
            Ok(target.kind.eval_dot(s))
        })
        .collect()
}
