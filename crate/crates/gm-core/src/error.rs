use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Incompatible sizes between matrices, vectors or matchings.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Input values outside the documented domain (negative weights,
    /// non-finite entries, invalid parameters).
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally unusable input (zero matrix, too few points).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// An iteration produced a state it cannot continue from.
    #[error("iteration breakdown: {0}")]
    Breakdown(String),

    /// A guarded size cap was exceeded.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    /// Malformed file contents.
    #[error("parse error in {path} (line {line}): {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// Underlying I/O failure, annotated with the path involved.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
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

    /// True for errors caused by unreadable input syntax rather than by
    /// values or sizes; the CLI maps these to its usage exit code.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
