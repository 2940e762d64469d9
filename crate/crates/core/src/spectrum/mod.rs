//! Eigenvalues `μ_k` of dot-product kernels on S^{d-1}, their asymptotics,
//! and the Mercer expansion `κ(t) = Σ_k μ_k N(d, k) P_k(t)`.

mod closed_form;
mod compute;
mod fit;
mod mercer;
mod precise;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use closed_form::{asymptotic_constant, mu_phi_closed_form};
pub use compute::{
    compute_spectrum, default_nodes, mu_quadrature, mu_quadrature_fn, mu_series, SpectrumOptions,
};
pub use fit::{fit_decay, fit_log_log, taylor_decay, FitResult, ZERO_RELATIVE};
pub use mercer::{ibp_identity_check, mercer_reconstruct, trace_partial_sums, IbpCheck};
pub use precise::mu_phi_quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(k: usize) -> Parity {
        if k.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn matches(self, k: usize) -> bool {
        Parity::of(k) == self
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How a spectrum is requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Series,
    Quadrature,
    /// Series when the family has one, quadrature otherwise.
    Auto,
}

impl FromStr for Route {
    type Err = Error;
    fn from_str(s: &str) -> Result<Route> {
        match s {
            "series" => Ok(Route::Series),
            "quadrature" => Ok(Route::Quadrature),
            "auto" => Ok(Route::Auto),
            _ => Err(Error::Parse(format!("route must be series, quadrature or auto, got `{s}`"))),
        }
    }
}

/// How a spectrum was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Series,
    Quadrature,
    ClosedForm,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Series => "series",
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed_form",
        })
    }
}

/// Truncation parameters recorded with a spectrum.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub series_order: Option<usize>,
    /// Whether the series tail beyond `series_order` was added from its fitted asymptotics.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tail_completion: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nodes_per_half: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub substitution_power: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMetadata {
    pub kernel: String,
    pub d: usize,
    pub method: Method,
    pub truncation: Truncation,
}

/// `μ_0..μ_K` for one kernel in dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub d: usize,
    pub mu: Vec<f64>,
    pub method: Method,
    /// Kernel spec text (or a description for ad hoc integrands).
    pub kernel: String,
    pub truncation: Truncation,
}

#[derive(Serialize, Deserialize)]
struct SpectrumJson {
    metadata: SpectrumMetadata,
    mu: Vec<f64>,
}

impl Spectrum {
    pub fn k_max(&self) -> usize {
        self.mu.len().saturating_sub(1)
    }

    pub fn metadata(&self) -> SpectrumMetadata {
        SpectrumMetadata {
            kernel: self.kernel.clone(),
            d: self.d,
            method: self.method,
            truncation: self.truncation.clone(),
        }
    }

    /// `k,mu,parity` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,mu,parity\n");
        for (k, mu) in self.mu.iter().enumerate() {
            out.push_str(&format!("{k},{mu:e},{}\n", Parity::of(k)));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = SpectrumJson { metadata: self.metadata(), mu: self.mu.clone() };
        serde_json::to_string_pretty(&doc).expect("spectrum serializes")
    }

    pub fn from_json(text: &str) -> Result<Spectrum> {
        let doc: SpectrumJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(Spectrum {
            d: doc.metadata.d,
            mu: doc.mu,
            method: doc.metadata.method,
            kernel: doc.metadata.kernel,
            truncation: doc.metadata.truncation,
        })
    }

    /// Read `μ_k` back from the CSV form; metadata is supplied by the caller.
    pub fn from_csv(text: &str, d: usize, kernel: &str, method: Method) -> Result<Spectrum> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let mut mu = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record?;
            let k: usize = record.get(0).unwrap_or("").trim().parse().map_err(|_| Error::Parse(format!("bad k on row {row}")))?;
            if k != row {
                return Err(Error::Parse(format!("expected k = {row}, found {k}")));
            }
            let v: f64 = record.get(1).unwrap_or("").trim().parse().map_err(|_| Error::Parse(format!("bad mu on row {row}")))?;
            mu.push(v);
        }
        Ok(Spectrum { d, mu, method, kernel: kernel.to_string(), truncation: Truncation::default() })
    }
}
