use thiserror::Error;

/// Errors produced by the profile, characteristic, spectral and solver layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("derivative of order {order} is not available for {kind} profiles")]
    UnsupportedDerivativeOrder { kind: &'static str, order: usize },

    #[error("argument {value} outside the admissible domain {what}")]
    DomainError { what: String, value: f64 },

    #[error("F' never becomes negative (min F' = {min_slope:e}); the wave does not break")]
    NoBreaking { min_slope: f64 },

    #[error("t = {t} is past the breaking time t_b = {t_b}; the implicit solution is multivalued")]
    PostBreaking { t: f64, t_b: f64 },

    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },

    #[error("exponent fit residual {residual} exceeds 0.1; window [{r_min:e}, {r_max:e}] is too wide")]
    WindowTooWide { r_min: f64, r_max: f64, residual: f64 },

    #[error("speed map is not invertible at u = {u} (V'(u) = {slope})")]
    NotInvertible { u: f64, slope: f64 },

    #[error("band [{k_lo}, {k_hi}] holds {found} usable bins, need at least {needed}")]
    InsufficientBins { k_lo: f64, k_hi: f64, found: usize, needed: usize },

    #[error("field is identically zero")]
    ZeroField,

    #[error("field mean {mean:e} is not zero (required by the reduced Ostrovsky model)")]
    NonZeroMean { mean: f64 },

    #[error("solution blew up at t = {t}: max|u| = {max_abs:e}")]
    BlowUp { t: f64, max_abs: f64 },

    #[error("model mismatch: expected {expected}, state holds {found}")]
    ModelMismatch { expected: &'static str, found: &'static str },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
