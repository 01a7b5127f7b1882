use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient domain: {finite} finite values, at least {needed} required")]
    InsufficientDomain { finite: usize, needed: usize },

    #[error("insufficient samples: got {got}, need at least {needed}")]
    InsufficientSamples { got: usize, needed: usize },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn ensure_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite, got {x}")))
    }
}
