use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("Hermite order {order} is above the supported maximum {max}")]
    UnsupportedOrder { order: usize, max: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("link `{0}` has no derivative")]
    UnsupportedLink(String),

    #[error("degenerate shift: {0}")]
    DegenerateShift(String),

    #[error("insufficient width: {0}")]
    InsufficientWidth(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;
