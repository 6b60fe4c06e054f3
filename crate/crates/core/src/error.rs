use thiserror::Error;

/// Errors raised anywhere in the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("capacity exceeded: dimension {dim} is above the limit {limit}")]
    Capacity { dim: u64, limit: u64 },

    #[error("empty set: {0}")]
    EmptySet(&'static str),

    #[error("resolvent is singular: distance from the spectrum is {distance:e}")]
    ResolventSingular { distance: f64 },

    #[error("energy {energy} lies outside the protected window [{lo}, {hi}]")]
    OutsideWindow { energy: f64, lo: f64, hi: f64 },

    #[error("no convergence: {detail} (max residual {max_residual:e})")]
    NonConvergence { detail: String, max_residual: f64 },

    #[error("LAPACK driver failed with info = {0}")]
    Lapack(i32),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("fit error: {0}")]
    Fit(String),
}

impl From<crate::scalar::LapackInfo> for Error {
    fn from(info: crate::scalar::LapackInfo) -> Self {
        Error::Lapack(info.0)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
