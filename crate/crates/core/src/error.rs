use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate width: estimate {mean} is within 3 standard errors ({std_err}) of zero")]
    DegenerateWidth { mean: f64, std_err: f64 },

    #[error("index set is not symmetric")]
    NotSymmetric,

    #[error("admissible sequence does not match the index set: {0}")]
    InvalidSequence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
