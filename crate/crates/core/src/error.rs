use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("probability {value} at coordinate {coordinate} is not in the open interval (0, 1)")]
    InvalidProbability { coordinate: usize, value: String },

    #[error("ground set must have at least one element")]
    EmptyGroundSet,

    #[error("ground set of size {n} exceeds the cap of {cap}")]
    SizeCap { n: usize, cap: usize },

    #[error("element {element} is outside the ground set [1, {n}]")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("family has zero measure")]
    EmptyFamily,

    #[error("certificate has not passed verification")]
    NotVerified,

    #[error("search did not terminate within {0} halvings")]
    SearchExhausted(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
