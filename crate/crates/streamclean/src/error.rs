use std::path::PathBuf;

/// Crate-wide error type.
///
/// Schema *faults* (malformed constraint definitions) are not errors: they are
/// returned as data from [`crate::model::Schema::validate`]. `Error` covers
/// conditions that stop an operation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected} fields, got {actual}")]
    ArityMismatch { expected: usize, actual: usize },

    #[error("vector out of order: {0}")]
    OutOfOrder(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("non-finite value fed to running statistics")]
    NonFinite,

    #[error("injection spec fault: {0}")]
    Injection(String),

    #[error("evaluation fault: {0}")]
    Evaluation(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    FileFormat { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn file(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::FileFormat {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by bad input files or I/O rather than bad configuration.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::FileFormat { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
