use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("dataset has no instances")]
    EmptyDataset,

    #[error("target attribute is not nominal: {0}")]
    NonNominalTarget(String),

    #[error("too few instances: {0}")]
    TooFewInstances(String),

    #[error("kappa undefined: {0}")]
    UndefinedKappa(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("feature arity mismatch: {0}")]
    ArityMismatch(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("accuracy out of [0,1]: {0}")]
    OutOfRangeAccuracy(f64),

    #[error("degenerate target: {0}")]
    DegenerateTarget(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Serde { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
