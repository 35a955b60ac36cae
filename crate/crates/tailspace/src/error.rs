use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("p must lie in [1, inf] (got {0})")]
    InvalidP(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("model configuration: {0}")]
    Config(String),

    #[error("exact search supports at most {cap} points per side (got {size})")]
    OracleCap { size: usize, cap: usize },

    #[error("distance matrix would have {size} points, cap is {cap}")]
    MatrixCap { size: usize, cap: usize },

    #[error("invalid correspondence: {0}")]
    Correspondence(String),

    #[error("empty sample")]
    EmptySample,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
