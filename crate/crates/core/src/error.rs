use thiserror::Error;

/// Errors raised by the divergence, estimator and bound routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A sample set or 1D sample vector has no points.
    #[error("empty input: {0}")]
    Empty(&'static str),

    /// A sample set contains a NaN or infinite coordinate.
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    /// A parameter lies outside its admissible domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Direction sampling kept drawing the zero vector.
    #[error("direction sampling failed after {0} degenerate draws")]
    DegenerateDirection(usize),

    /// A hypergeometric series did not reach its truncation tolerance.
    #[error("series did not converge within {terms} terms (partial sum {partial})")]
    SeriesNotConverged { terms: usize, partial: f64 },

    /// The tail integral of a sample-complexity constant diverges.
    #[error("tail integral diverges: {0}")]
    DivergentIntegral(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
