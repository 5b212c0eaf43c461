use thiserror::Error;

/// Errors produced by the brushing engine and its supporting modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("index {index} out of range for {len} points")]
    Index { index: usize, len: usize },

    #[error("alignment error: dataset has {dataset} rows, projection has {projection}")]
    Alignment { dataset: usize, projection: usize },

    #[error("painter covers no points")]
    EmptyCover,

    #[error("no contour at level {level} (grid maximum {max})")]
    EmptyContour { level: f64, max: f64 },

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("operation not allowed in phase {0}")]
    Phase(String),

    #[error("illegal event at index {index}: {reason}")]
    Trajectory { index: usize, reason: String },

    #[error("fixture size {n} exceeds oracle limit {limit}")]
    Size { n: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
