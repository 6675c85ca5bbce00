use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FgtError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("multi-index coordinate {value} exceeds the factorial guard {limit}")]
    FactorialOverflow { value: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("point does not lie in the box of the given center")]
    OutsideBox,

    #[error("accuracy unreachable: {which} would exceed the cap of {cap}")]
    AccuracyUnreachable { which: &'static str, cap: usize },

    #[error("point not present in the structure")]
    NotFound,

    #[error("index {index} out of range for {len} sources")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid state: {0}")]
    State(&'static str),
}

pub type Result<T, E = FgtError> = std::result::Result<T, E>;
