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

    /// A line of a record, sidecar or score file could not be parsed.
    #[error("line {line}: field `{field}`: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },

    /// A parsed record violates one of its invariants.
    #[error("record `{id}`: {message}")]
    InvalidRecord { id: String, message: String },

    /// A pairwise matrix does not have the n×n shape of its record.
    #[error("record `{id}`: {matrix} matrix is {rows}x{cols}, expected {n}x{n}")]
    Shape {
        id: String,
        matrix: &'static str,
        rows: usize,
        cols: usize,
        n: usize,
    },

    #[error("record `{id}`: missing {what} (required by {by})")]
    Missing {
        id: String,
        what: &'static str,
        by: String,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown method `{0}`")]
    UnknownMethod(String),

    #[error("unknown similarity `{0}`")]
    UnknownSimilarity(String),

    /// One or more records cannot satisfy the requested methods.
    #[error("requirements not met:\n{0}")]
    Requirements(String),

    /// A metric is undefined for the given labels or qualities.
    #[error("{metric} undefined: {reason}")]
    Metric {
        metric: &'static str,
        reason: String,
    },

    #[error("score for `{0}` is not finite")]
    NonFinite(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(id: &str, message: impl Into<String>) -> Self {
        Error::InvalidRecord {
            id: id.to_string(),
            message: message.into(),
        }
    }

    /// True for errors caused by bad input data or arguments, as opposed to I/O.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Io { .. })
    }
}
