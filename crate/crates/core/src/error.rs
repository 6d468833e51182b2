use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sequence length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("local factor is not positive at prime {prime}: {value}")]
    NonPositiveFactor { prime: u64, value: f64 },

    #[error("quadrature did not converge: estimated error {error:e} exceeds {tolerance:e}")]
    QuadratureNonConvergence { error: f64, tolerance: f64 },

    #[error("character has {have} coordinates but index {index} needs prime #{need}")]
    InsufficientCharacter {
        have: usize,
        need: usize,
        index: usize,
    },

    #[error("full product needs {needed} coefficients, budget is {budget}")]
    MemoryBudget { needed: u128, budget: u128 },

    #[error("divergent quantity: {0}")]
    Divergent(String),

    #[error("truncation insufficient: tail estimate {tail:e} exceeds tolerance {tolerance:e}")]
    TruncationInsufficient { tail: f64, tolerance: f64 },

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
