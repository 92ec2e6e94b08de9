use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modulus sequence is empty")]
    EmptyModuli,

    #[error("modulus m_{position} = {value} is smaller than 2")]
    InvalidModulus { position: usize, value: u64 },

    #[error("scale M_{depth} does not fit in 64 bits")]
    ScaleOverflow { depth: usize },

    #[error("operands belong to different modulus sequences")]
    ModulusMismatch,

    #[error("digit {digit} at position {position} is not below modulus {modulus}")]
    DigitOutOfRange {
        position: usize,
        digit: u64,
        modulus: u64,
    },

    #[error("index {index} is out of range (bound {bound})")]
    IndexOutOfRange { index: u64, bound: u64 },

    #[error("depth {depth} exceeds the available depth {max}")]
    DepthOutOfRange { depth: usize, max: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} needs {required} but the budget is {budget}")]
    BudgetExceeded {
        what: String,
        required: u128,
        budget: u128,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
