use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("scores and labels differ in length: {scores} vs {labels}")]
    LengthMismatch { scores: usize, labels: usize },

    #[error("metric inputs must be non-empty")]
    Empty,

    #[error("labels are degenerate: {0}")]
    DegenerateLabels(&'static str),

    #[error("histogram needs at least 1 bin")]
    InvalidBins,

    #[error("score {0} is outside [0, 1]")]
    ScoreOutOfRange(f64),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, MetricsError>;
