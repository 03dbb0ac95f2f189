use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A value violates an operation's contract (bad id, wrong length, NaN input, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A structurally valid request that cannot be executed (bad grids, budgets, names).
    #[error("configuration error: {0}")]
    Config(String),

    /// Filesystem failure, with the offending path.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A malformed file; `section` names the part that failed.
    #[error("parse error in {section}: {detail}")]
    Parse { section: String, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn parse(section: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Parse { section: section.into(), detail: detail.into() }
    }
}
