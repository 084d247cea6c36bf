use thiserror::Error;

/// Errors shared across the certification pipeline.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input outside an operation's domain (division by a ball containing 0,
    /// bad degree, out-of-range stage index, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A certificate could not be established at the working precision and
    /// subdivision limits. Retrying at higher precision may succeed.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    /// A certified quantity contradicts what the construction guarantees
    /// (count mismatch, failed cascade inequality, ...).
    #[error("certification failure: {0}")]
    Certification(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn precision(msg: impl Into<String>) -> Self {
        Error::PrecisionExhausted(msg.into())
    }
    pub fn certification(msg: impl Into<String>) -> Self {
        Error::Certification(msg.into())
    }
}
