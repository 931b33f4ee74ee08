use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report. Each variant names the
/// precondition that was violated.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus {0} is not an odd prime below 2^63")]
    BadModulus(u64),

    #[error("field mismatch: expected modulus {expected}, got {got}")]
    FieldMismatch { expected: u64, got: u64 },

    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("variable index {index} out of range for {n} variables")]
    VariableOutOfRange { index: usize, n: usize },

    #[error("product is not multilinear: {0}")]
    NotMultilinear(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("multilinearity violated in gate {gate}: {detail}")]
    Multilinearity { gate: usize, detail: String },

    #[error("expansion exceeded the term cap of {cap}")]
    TermCap { cap: usize },

    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    Budget {
        what: String,
        needed: f64,
        budget: f64,
    },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("formula class mismatch: {0}")]
    Class(String),

    #[error("ROABP precondition violated at gate {gate}, factor {factor}: {detail}")]
    RoabpPrecondition {
        gate: usize,
        factor: usize,
        detail: String,
    },

    #[error("no member of the hash family (size {family_size}) satisfies both conditions")]
    HashExhausted { family_size: u128 },

    #[error("the input polynomial is zero; {0}")]
    ZeroPolynomial(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal invariant broken: {0}")]
    Internal(String),

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("malformed point-set file, line {line}: {msg}")]
    PointFile { line: usize, msg: String },
}
