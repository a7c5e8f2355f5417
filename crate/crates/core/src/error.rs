use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("integrand is not finite at r = {radius}")]
    NonFinite { radius: f64 },

    #[error("dimension {0} is not supported here")]
    UnsupportedDimension(usize),

    #[error("input {index} must be strictly positive, got {value}")]
    NonPositive { index: usize, value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("q = {q} does not exceed the integrability threshold {threshold}")]
    BelowThreshold { q: f64, threshold: f64 },

    #[error("invalid specification: {0}")]
    Spec(String),

    #[error("test function cannot supply derivatives of order {0}")]
    Capability(usize),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}
