use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid `{field}`: {reason}")]
    InvalidInput { field: String, reason: String },
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
    #[error("numerical breakdown: {0}")]
    Breakdown(String),
    #[error("size guard: {0}")]
    SizeGuard(String),
    #[error("contour: {0}")]
    Contour(String),
    #[error("malformed weight array: {0}")]
    MalformedWeights(String),
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidInput { field: field.into(), reason: reason.into() }
    }

    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Breakdown(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
