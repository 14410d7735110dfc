use thiserror::Error;

/// Errors raised by the analysis, spectral and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid grid configuration: {0}")]
    Config(String),

    #[error("range error: exponent {exponent} exceeds {limit}; subsample the time horizon")]
    Range { exponent: f64, limit: f64 },

    #[error("quartic solver failure: {0}")]
    Solver(String),

    #[error("quadrature did not converge: estimate {estimate}, error bound {error}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("Picard iteration failed to contract: increments {increments:?}")]
    Contraction { increments: Vec<f64> },

    #[error("rate fit failed: {0}")]
    Fit(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
