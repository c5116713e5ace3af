use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: row {row}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: String, found: String },

    #[error("row {row} has non-positive sum {sum}")]
    NonPositiveRow { row: usize, sum: f64 },

    #[error("content cached on the device but transcoded at the edge is not a legal case")]
    InvalidCase,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("problem too large for exhaustive search: {0}")]
    SizeLimit(String),

    #[error("bisection did not converge within {0} iterations")]
    Bisection(usize),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
