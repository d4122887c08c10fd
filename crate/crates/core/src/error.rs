//! Error type shared by all toolkit modules.

use std::path::PathBuf;

/// Errors produced by toolkit operations.
///
/// `Io`, `Parse` and `LengthMismatch` describe problems with input files;
/// the remaining variants describe computation-level failures.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("length mismatch {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("unseen token {0:?}")]
    UnseenToken(String),
    #[error("non-finite log-likelihood (numeric underflow)")]
    NonFiniteLikelihood,
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }

    /// True for errors caused by unreadable or malformed input files rather
    /// than by the computation itself. Front-ends use this to pick exit codes.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. } | Error::Parse { .. } | Error::LengthMismatch { .. }
        )
    }
}
