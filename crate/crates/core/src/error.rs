use thiserror::Error;

/// Errors raised by the laboratory's operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    /// The tail probability underflowed; the caller should work in log space.
    #[error("tail probability at {level} underflows to zero; use log-space routines")]
    TailUnderflow { level: f64 },

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("recurrent walk: {0}")]
    Recurrent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
