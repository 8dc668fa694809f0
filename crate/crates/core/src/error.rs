use thiserror::Error;

#[derive(Debug, Error)]
pub enum CasimirError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported model for this operation: {0}")]
    UnsupportedModel(&'static str),

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("malformed optical table (line {line}): {reason}")]
    MalformedTable { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CasimirError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(CasimirError::Domain(msg.into()))
}
