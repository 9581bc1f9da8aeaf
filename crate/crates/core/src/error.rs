//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("token not in vocabulary: {0}")]
    OutOfVocabulary(String),

    #[error("reservoir is empty; no tokens offered yet")]
    EmptyReservoir,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("wordlist too small: need at least {need} words, got {got}")]
    WordlistTooSmall { need: usize, got: usize },

    #[error("corrupt model file: {0}")]
    CorruptModel(String),

    #[error("unsupported model file version {got} (supported: {supported})")]
    VersionMismatch { got: u32, supported: u32 },

    #[error("model has no trained classifier section")]
    ClassifierMissing,

    #[error("verdict token missing from ground truth: {0}")]
    MissingTruth(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// CLI exit code: 1 for input problems, 2 for internal failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. }
            | Error::Config(_)
            | Error::CorruptModel(_)
            | Error::VersionMismatch { .. }
            | Error::WordlistTooSmall { .. }
            | Error::MissingTruth(_)
            | Error::ClassifierMissing => 1,
            Error::OutOfVocabulary(_) | Error::EmptyReservoir | Error::DimensionMismatch { .. } => {
                2
            }
        }
    }
}
