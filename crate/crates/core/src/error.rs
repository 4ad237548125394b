//! Error type shared by all toolkit modules.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, CoreError>;

#[derive(Debug, Error)]
pub enum CoreError {
    /// A geometric or physical parameter was non-finite, non-positive, or
    /// otherwise outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A simulation state that should be unreachable was observed, e.g. a
    /// molecule starting a step inside an absorbing sphere.
    #[error("internal consistency fault: {0}")]
    ConsistencyFault(String),

    /// The fitted curve carries no usable signal (all-zero response), so the
    /// amplitude coefficient is unidentifiable.
    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),

    /// A curve is too short for the requested slot window.
    #[error("curve covers {available_s} s but {required_s} s are required")]
    CurveTooShort { required_s: f64, available_s: f64 },

    /// Model evaluation produced a value outside [0, 1] beyond tolerance.
    #[error("model output {value} at t={t_s} s is outside [0, 1]")]
    ModelOutOfRange { t_s: f64, value: f64 },

    /// Training dataset has fewer rows than the minimum.
    #[error("dataset has {rows} rows, need at least {min}")]
    DatasetTooSmall { rows: usize, min: usize },

    /// The training objective became NaN or infinite.
    #[error("non-finite training loss at epoch {epoch}: {detail}")]
    NonFiniteLoss { epoch: usize, detail: String },

    /// Prediction requested from a model that has not been trained.
    #[error("model has not been trained")]
    Untrained,

    /// Two time grids or vectors that must align do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Enumeration or resource guard tripped (e.g. ISI window too large).
    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),

    /// Malformed persisted artifact (CSV or JSON).
    #[error("parse error: {0}")]
    Parse(String),
}
