use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A coefficient outside the known window of a truncated series was needed.
    #[error("insufficient order: coefficient of exponent {needed} requested, expansion only known below {known}")]
    InsufficientOrder { needed: i64, known: i64 },
    #[error("empty expansion: order {order} does not exceed valuation {valuation}")]
    EmptyExpansion { order: i64, valuation: i64 },
    #[error("exact series has infinitely many terms; truncate before inverting")]
    InfiniteExpansion,
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole: {0}")]
    Pole(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("logarithmic primitive: y dx has residue {0} at {1}")]
    LogarithmicPrimitive(String, String),
    #[error("field error: {0}")]
    Field(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("unsupported branching number {order} at z = {location}")]
    UnsupportedBranching { order: usize, location: String },
    #[error("basepoint error: {0}")]
    Basepoint(String),
    #[error("order cap {cap} exceeded while computing {what}")]
    OrderCap { cap: usize, what: String },
    #[error("series tower depth {depth} exceeds cap {cap}")]
    DepthCap { depth: usize, cap: usize },
    #[error("usage error: {0}")]
    Usage(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("regularization error: {0}")]
    Regularization(String),
    #[error("unsupported curve: {0}")]
    UnsupportedCurve(String),
}

impl Error {
    /// True for errors caused by resource caps rather than bad input or wrong math.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::OrderCap { .. } | Error::DepthCap { .. })
    }
}
