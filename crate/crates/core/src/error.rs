//! Error type shared across the crate.

use std::path::PathBuf;

/// Everything that can go wrong while ingesting data, fitting models or
/// evaluating them.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A line-oriented input file could not be parsed. `line` is 1-based.
    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("duplicate document id {id:?}")]
    DuplicateId { id: String },

    #[error("invalid CVE identifier {value:?} (expected CVE-YYYY-NNNN with a 4-digit year and a sequence of 4 or more digits)")]
    InvalidCveId { value: String },

    #[error("document {id:?} has no label")]
    MissingLabel { id: String },

    #[error("cannot fit on an empty corpus")]
    EmptyCorpus,

    #[error("no labeled positives: recall is undefined at every threshold")]
    NoPositives,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("model file error: {0}")]
    ModelFormat(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
