use std::io;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("{}: line {line}: {message}", path.display())]
    Parse { path: PathBuf, line: usize, message: String },

    #[error("{0}")]
    Validation(String),

    #[error("{0}")]
    Usage(String),

    #[error("network: {0}")]
    Network(String),

    #[error(transparent)]
    Core(#[from] hoaxscope_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl AsRef<Path>, source: io::Error) -> Self {
        Error::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    pub fn parse(path: impl AsRef<Path>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.as_ref().to_path_buf(),
            line,
            message: message.into(),
        }
    }

    /// 2 for I/O and network failures, 1 for everything the user can fix
    /// by changing inputs or flags.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Network(_) => 2,
            _ => 1,
        }
    }
}
