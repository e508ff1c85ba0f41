use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {0} is too large")]
    FieldTooLarge(String),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("invalid field `{0}`, expected p^r or a prime power q")]
    InvalidFieldSpec(String),
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("element value {value} is out of range for a field of order {q}")]
    ElementOutOfRange { value: u64, q: u64 },
    #[error("cyclotomic integers over different primes ({0} and {1})")]
    PrimeMismatch(u64, u64),
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("invalid monomial pattern: {0}")]
    InvalidPattern(String),
    #[error("variable index {index} is outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("shift amount {k} is outside 1..={n}")]
    ShiftOutOfRange { k: usize, n: usize },
    #[error("n = {n} is below the minimum {min} for this expression")]
    TooFewVariables { n: usize, min: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("enumerating {points} points exceeds the budget of {budget}; use the transfer or recurrence method")]
    BudgetExceeded { points: u128, budget: u128 },
    #[error("weight is only defined over F_2")]
    NotBoolean,
    #[error("need at least {needed} terms, have {have}")]
    TooFewTerms { needed: usize, have: usize },
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("the zero polynomial is not allowed here")]
    ZeroPolynomial,
    #[error("polynomial is constant")]
    ConstantPolynomial,
    #[error("backward extension is not integral at n = {0}")]
    NonIntegral(i64),
    #[error("insufficient data: need at least {needed} terms, have {have}")]
    InsufficientData { needed: usize, have: usize },
    #[error("no recurrence of order at most {0} fits the data")]
    NoRecurrence(usize),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("transfer system needs {states} states, above the limit of {limit}")]
    StateLimit { states: usize, limit: usize },
    #[error("integer blow-up dimension {dim} exceeds the limit of {limit}")]
    BlowupLimit { dim: usize, limit: usize },
    #[error("annihilating polynomial degree exceeds the cap of {0}")]
    DegreeCap(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("empty range")]
    EmptyRange,
    #[error("sequences do not overlap")]
    EmptyOverlap,
    #[error("matrix is not square")]
    NotSquare,
    #[error("consistency check failed: {0}")]
    Consistency(String),
    #[error("{0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by a configurable size limit rather than bad input.
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. }
                | Error::StateLimit { .. }
                | Error::BlowupLimit { .. }
                | Error::DegreeCap(_)
                | Error::FieldTooLarge(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
