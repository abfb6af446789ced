//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("class {0} is empty")]
    EmptyClass(usize),

    #[error("class {0} needs at least {1} points")]
    ClassTooSmall(usize, usize),

    #[error("solver did not converge within {iterations} iterations (kkt gap {gap:.3e})")]
    NoConvergence { iterations: usize, gap: f64 },

    #[error("rung at pi={pi}: {source}")]
    RungFailure { pi: f64, source: Box<Error> },

    #[error("line {line}: {msg}")]
    CsvFormat { line: usize, msg: String },

    #[error("unsupported model format version {0}")]
    UnsupportedVersion(u32),

    #[error("{0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
