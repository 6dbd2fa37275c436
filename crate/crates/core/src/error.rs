use thiserror::Error;

/// Errors raised by construction, estimation and certification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vector is not normalized (norm {0}); normalize before calling")]
    NotNormalized(f64),

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resource cap exceeded: {what} needs {required} elements, cap is {cap}")]
    ResourceCap {
        what: String,
        required: u128,
        cap: u128,
    },

    #[error("partition does not respect coordinate ordering: {alpha:?} lowered to {gamma:?} lands in cell {to} which is not before cell {from}")]
    PartitionOrder {
        alpha: Vec<usize>,
        gamma: Vec<usize>,
        from: usize,
        to: usize,
    },

    #[error("embedding for factor {factor}: n = {n} exceeds symmetric dimension {max}")]
    EmbeddingTooLarge {
        factor: usize,
        n: usize,
        max: String,
    },

    #[error("bound violation: {0}")]
    BoundViolation(String),

    #[error("malformed input: {0}")]
    Format(String),
}

impl Error {
    /// Short machine-readable tag used in CLI error documents.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotNormalized(_) => "not_normalized",
            Error::InvalidBipartition(_) => "invalid_bipartition",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::ResourceCap { .. } => "resource_cap",
            Error::PartitionOrder { .. } => "partition_order",
            Error::EmbeddingTooLarge { .. } => "embedding_too_large",
            Error::BoundViolation(_) => "bound_violation",
            Error::Format(_) => "format",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
