use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrecError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl FrecError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        FrecError::InvalidArgument(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        FrecError::Format(msg.into())
    }
}

impl From<std::io::Error> for FrecError {
    fn from(e: std::io::Error) -> Self {
        FrecError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, FrecError>;
