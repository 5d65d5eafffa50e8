use thiserror::Error;

/// Errors raised by estimators, simulators and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("translation overlap is empty for shift ({dx}, {dy})")]
    UndefinedOverlap { dx: f64, dy: f64 },

    #[error("insufficient points: got {got}, need at least {need}")]
    InsufficientPoints { got: usize, need: usize },

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("points outside the window at rows {rows:?}")]
    OutOfWindow { rows: Vec<usize> },

    #[error("non-finite value at row {row}")]
    NonFinite { row: usize },

    #[error("normalizer is zero for test function {0:?}")]
    ZeroNormalizer(String),

    #[error("no r value has a usable denominator")]
    AllMissing,

    #[error("bandwidth selection degenerate: every candidate gave a non-finite objective")]
    DegenerateBandwidth,

    #[error("intensity is unbounded or invalid on the window: {0}")]
    UnboundedIntensity(String),

    #[error("covariance matrix not positive definite after jitter up to {jitter:e}")]
    NotPositiveDefinite { jitter: f64 },

    #[error("unknown scenario preset {0:?}")]
    UnknownPreset(String),

    #[error("ensemble curves have mismatched lengths")]
    CurveLengthMismatch,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
