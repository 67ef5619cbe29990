use thiserror::Error;

/// Errors produced by the morphology library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid mismatch: operand is on a {found} grid, expected {expected}")]
    GridMismatch { expected: String, found: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("k = {k} is out of range 0..={max}")]
    KOutOfRange { k: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
