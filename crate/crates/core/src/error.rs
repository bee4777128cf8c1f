use thiserror::Error;

/// Errors raised by the resolvability primitives and constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabet must contain at least one symbol")]
    EmptyAlphabet,

    #[error("duplicate symbol {0:?} in alphabet")]
    DuplicateSymbol(String),

    #[error("invalid symbol label {0:?}: labels must be non-empty and free of whitespace")]
    InvalidLabel(String),

    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),

    #[error("symbol index {index} out of range for alphabet of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("distribution has {got} entries, alphabet has {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid probability {value} at index {index}")]
    InvalidProbability { index: usize, value: f64 },

    #[error("probabilities sum to {sum}, expected 1 within 1e-9")]
    NotNormalized { sum: f64 },

    #[error("channel row {row} ({label}) is not a distribution: {reason}")]
    NotStochastic { row: usize, label: String, reason: String },

    #[error("enumeration needs {needed} states, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: usize },

    #[error("epsilon {0} outside (0, 1/2]")]
    EpsilonOutOfRange(f64),

    #[error("cost {value} at strategy {index} outside [0, 1]")]
    CostOutOfRange { index: usize, value: f64 },

    #[error("parameter {name} = {value} is invalid: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("support of the truncated output measure is empty")]
    EmptySupport,

    #[error("codebook is empty")]
    EmptyCodebook,

    #[error("strong typical set is empty; set B is undefined for these parameters")]
    EmptyTypicalSet,

    #[error("no type has mass at least tau'/|T|; the source-resolvability set D is empty")]
    EmptyTypeSet,

    #[error("malformed codebook: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
