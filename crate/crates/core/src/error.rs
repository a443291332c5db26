use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("truncation level m must be at least 1 (got {0})")]
    EmptyBasis(u32),

    #[error("operator {0} is outside the truncated basis")]
    OutOfBasis(String),

    #[error("linear system would have {dim} variables, above the cap of {cap}; use a smaller N or m")]
    DimensionOverflow { dim: u128, cap: usize },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad user input or an inaccessible path
    /// rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::Parse(_)
                | Error::EmptyBasis(_)
                | Error::DimensionOverflow { .. }
                | Error::Io { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
