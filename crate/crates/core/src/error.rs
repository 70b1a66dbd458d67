use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument lies outside the range where a formula or
    /// construction is defined.
    #[error("range error: {0}")]
    Range(String),

    /// Malformed or inconsistent input (wrong lengths, bad parameters, bad
    /// recipe text).
    #[error("input error: {0}")]
    Input(String),

    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),

    /// Rank-deficient system during elimination.
    #[error("singular system: {0}")]
    Singular(String),

    /// Linear system with a right-hand side outside the column span.
    #[error("inconsistent system: {0}")]
    Inconsistent(String),

    /// A code failed one of its own structural guarantees. This signals a
    /// broken code rather than bad input.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// A construction or sweep would exceed the configured size ceiling.
    #[error("resource budget exceeded: {0}")]
    Resource(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
