use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite {what} encountered")]
    NonFinite { what: &'static str },

    #[error("line search failed to satisfy the Armijo condition after {backtracks} backtracks")]
    LineSearchFailed { backtracks: usize },

    #[error("degenerate denominator in conjugate parameter")]
    DegenerateBeta,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error(transparent)]
    Json(#[from] JsonError),
}

/// Wrapper so that `Error` stays `Clone + PartialEq`.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("json: {0}")]
pub struct JsonError(pub String);

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(JsonError(e.to_string()))
    }
}
