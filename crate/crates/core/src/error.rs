use thiserror::Error;

/// Errors produced by the alcove engine.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-domain input (bad rank, weight outside the alcove, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configurable size bound was exceeded.
    #[error("{what} is {value}, exceeding the bound {bound}")]
    BoundExceeded {
        what: &'static str,
        value: u128,
        bound: u128,
    },

    /// An algebraic identity that must hold exactly did not.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
