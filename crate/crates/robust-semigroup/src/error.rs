use thiserror::Error;

/// Errors surfaced by the numerical layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation
    /// (negative time, order p ≤ 1, negative radius, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A model is structurally invalid (non-PSD covariance, bad weights).
    #[error("model error: {0}")]
    Model(String),

    /// A grid/scheme configuration cannot support the requested run
    /// (mass leak past the truncation, CFL violation, boundary values).
    #[error("configuration error: {0}")]
    Configuration(String),

    /// The instance exceeds a documented resource cap.
    #[error("resource error: {0}")]
    Resource(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn model(msg: impl Into<String>) -> Self {
        Error::Model(msg.into())
    }
    pub fn configuration(msg: impl Into<String>) -> Self {
        Error::Configuration(msg.into())
    }
    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}
