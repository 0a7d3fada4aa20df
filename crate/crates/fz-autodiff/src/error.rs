use thiserror::Error;

#[derive(Debug, Error)]
pub enum AutodiffError {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("backward target must be a scalar, got shape {0:?}")]
    NonScalarLoss(Vec<usize>),

    #[error("dropout probability must be in [0, 1), got {0}")]
    InvalidProbability(f64),

    #[error("batch normalization needs at least 2 values per channel in training mode, got {0}")]
    DegenerateBatch(usize),

    #[error("binary cross-entropy targets must be 0 or 1, got {0}")]
    NonBinaryTarget(f64),

    #[error("optimizer state error: {0}")]
    State(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, AutodiffError>;
