use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Syntax error in a definition, rule, or data file.
    #[error("{file}:{line}:{col}: {msg}")]
    Parse {
        file: String,
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("config error: {0}")]
    Config(String),

    /// A persisted store file failed to load; no partial state is kept.
    #[error("corrupt store file {file} (line {line}): {msg}")]
    Corrupt {
        file: String,
        line: usize,
        msg: String,
    },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("feed error: {0}")]
    Feed(String),

    #[error("article rejected: {0}")]
    Reject(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(file: impl Into<String>, line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            file: file.into(),
            line,
            col,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
