//! Error type shared across the crate.

use thiserror::Error;

/// Failure categories. The split mirrors how callers should react: bad
/// arguments or model setup, unreadable/inconsistent data, or a numerical
/// breakdown inside a sampler or optimizer.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument, configuration, or model setup.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Malformed or inconsistent data.
    #[error("data error: {0}")]
    Data(String),
    /// Numerical failure (non-finite quantity, failed factorization, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for this failure category: 1 usage, 2 data,
    /// 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) => 1,
            Error::Data(_) => 2,
            Error::Numerical(_) => 3,
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
