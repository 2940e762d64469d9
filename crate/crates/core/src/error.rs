use thiserror::Error;

/// Errors raised by the spectral and regression routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument outside the domain: {0}")]
    Domain(String),

    /// Gamma function evaluated at a non-positive integer.
    #[error("gamma pole at {0}")]
    Pole(f64),

    #[error("unknown kernel `{0}`")]
    UnknownKernel(String),

    #[error("invalid kernel parameter: {0}")]
    InvalidParameter(String),

    #[error("{family} has no power series representation; use the quadrature route")]
    SeriesUnsupported { family: String },

    #[error("composition needs an inner series with nonnegative coefficients and value at 1 at most 1")]
    UnsupportedComposition,

    #[error("endpoint expansion unknown for {0}; fit the decay instead")]
    ExpansionUnknown(String),

    #[error("{0} is not twice differentiable on [-1, 1]")]
    NotSmooth(String),

    #[error("fit needs at least {needed} positive entries, found {found}")]
    Fit { needed: usize, found: usize },

    #[error("data error: {0}")]
    Data(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("factorization failed after jitter escalation (n = {0})")]
    Conditioning(usize),

    #[error("no grid value at or above lambda_min = {0}")]
    EmptyGrid(f64),

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable tag used on the command line.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Pole(_) => "gamma-pole",
            Error::UnknownKernel(_) => "unknown-kernel",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::SeriesUnsupported { .. } => "route-unsupported",
            Error::UnsupportedComposition => "unsupported-composition",
            Error::ExpansionUnknown(_) => "expansion-unknown",
            Error::NotSmooth(_) => "not-smooth",
            Error::Fit { .. } => "fit-failed",
            Error::Data(_) => "data",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::Conditioning(_) => "conditioning",
            Error::EmptyGrid(_) => "empty-grid",
            Error::Io(_) => "io",
            Error::Parse(_) => "parse",
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Fit { .. } | Error::Conditioning(_) | Error::Pole(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Data(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
