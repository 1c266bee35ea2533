use alloc::string::String;
use core::fmt;

/// Errors raised by the analysis kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input violates a documented precondition (sizes, ranges, labels).
    Argument(String),
    /// Mathematical domain violation (zero norm, empty text, zero span).
    Domain(String),
    /// Data violates a type invariant (duplicate ids, unsorted timestamps).
    Validation(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Argument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Validation(msg) => write!(f, "validation error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
