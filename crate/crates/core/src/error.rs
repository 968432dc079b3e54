use thiserror::Error;

/// Errors raised by the accounting toolkit.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    /// An argument fell outside the domain an operation accepts.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical accountant could not produce a trustworthy answer.
    #[error("accounting error: {0}")]
    Accounting(String),

    /// An input exceeded a resource limit.
    #[error("resource error: {0}")]
    Resource(String),

    /// A constructed object failed its post-validation.
    #[error("construction error: {message} (worst violation {worst_violation:e})")]
    Construction { message: String, worst_violation: f64 },

    /// A witness search ran out of candidates.
    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn accounting(msg: impl Into<String>) -> Self {
        Error::Accounting(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
