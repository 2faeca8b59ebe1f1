use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A problem specification failed validation.
    #[error("invalid problem spec: {0}")]
    InvalidSpec(String),
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical routine failed to converge or produced non-finite values.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Internal consistency violation (should be unreachable for valid inputs).
    #[error("internal consistency error: {0}")]
    Internal(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
