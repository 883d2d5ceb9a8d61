use thiserror::Error;

/// Errors produced by the spectral toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "quadrature for lambda({n},{l}) did not converge: partial value {partial:e}, \
         error estimate {err_estimate:e} after {panels} panels ({reason})"
    )]
    Convergence {
        n: usize,
        l: usize,
        partial: f64,
        err_estimate: f64,
        panels: usize,
        reason: String,
    },

    #[error("eigenvalue lambda({n},{l}) is not stored in the table")]
    MissingEigenvalue { n: usize, l: usize },

    #[error("quadrature resolution {given} cannot certify the result (needs {needed})")]
    Resolution { given: usize, needed: usize },

    #[error("cache rejected: {0}")]
    Cache(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
