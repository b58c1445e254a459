use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, NafsError>;

#[derive(Debug, Error)]
pub enum NafsError {
    /// A record in an input file (or an in-memory edge list) could not be used.
    #[error("load error at line {line}: {message}")]
    Load { line: usize, message: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: String, actual: String },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("graph is disconnected ({components} components); {context} needs a connected graph")]
    Disconnected { components: usize, context: String },

    #[error("malformed matrix file: {0}")]
    Format(String),

    #[error("manifest mismatch for `{field}`: manifest says {declared}, loaded {actual}")]
    Manifest {
        field: String,
        declared: usize,
        actual: usize,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

impl NafsError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        NafsError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        NafsError::Parameter(msg.into())
    }

    pub(crate) fn dims(expected: impl ToString, actual: impl ToString) -> Self {
        NafsError::Dimension {
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }
}
