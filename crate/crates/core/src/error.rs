use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid correlation scheme: {0}")]
    InvalidScheme(String),

    #[error("value {value} outside domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("qubit count {0} must be even")]
    Parity(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("qubit count {n} exceeds the supported maximum {max}")]
    Size { n: usize, max: usize },

    #[error("rotated coherent-state label leaves the chart (denominator {0:e})")]
    Pole(f64),

    #[error("family {0} has no closed-form derivative; request CentralFD explicitly")]
    NoAnalytic(String),

    #[error("family {0} is not parameterized by angles")]
    NotAngleParameterized(String),

    #[error("fit needs at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("log-space fit requires positive data, got {0}")]
    NonPositive(f64),

    #[error("scaling fit model mismatch: {0}")]
    ModelMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
