//! Error type shared across the crate.

use thiserror::Error;

/// Errors surfaced by solvers, data loading and graph construction.
#[derive(Debug, Error)]
pub enum CoreError {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A mandatory CSV column is missing from the input header.
    #[error("schema error: missing column `{column}`")]
    Schema { column: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;

/// Shorthand for constructing an [`CoreError::InvalidArgument`].
pub fn invalid_argument<T>(msg: impl Into<String>) -> Result<T> {
    Err(CoreError::InvalidArgument(msg.into()))
}
