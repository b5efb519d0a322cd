use thiserror::Error;

/// Errors surfaced by sampling, seminorm, integration and solver routines.
///
/// `Domain` covers rejected inputs (bad exponents, mismatched shapes, empty
/// grids). `Numerical` covers failures of the arithmetic itself (covariance
/// not factorizable, divergent trajectories). `Io` wraps file-format trouble
/// for the dump/load helpers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("trajectory diverged at t = {t}: |y| = {norm:.3e} exceeds the guard")]
    Diverged { t: f64, norm: f64 },

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed file {path}: {reason}")]
    Format { path: String, reason: String },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
