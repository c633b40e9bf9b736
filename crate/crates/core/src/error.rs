use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("mesh error: {0}")]
    Mesh(String),
    #[error("assembly error: {0}")]
    Assembly(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("operator is not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
