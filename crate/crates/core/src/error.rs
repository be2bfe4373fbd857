use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{what}: size {size} exceeds the configured bound {bound}")]
    BoundExceeded {
        what: &'static str,
        size: u128,
        bound: u128,
    },

    #[error("division by zero in a finite field")]
    DivisionByZero,

    #[error("discrete logarithm of zero")]
    LogOfZero,

    #[error("cannot embed F_{{p^{from}}} into F_{{p^{target}}}")]
    IncompatibleDegrees { from: u32, target: u32 },

    #[error("elements belong to different fields")]
    FieldMismatch,

    #[error("multiplicative character evaluated at zero")]
    EvalAtZero,

    #[error("certified error {err:e} exceeds the budget {budget:e}")]
    PrecisionBudgetExceeded { err: f64, budget: f64 },

    #[error("value {value} is not within its error bound {err:e} of an integer")]
    NonIntegral { value: String, err: f64 },

    #[error("lambda = 0 forces k_(n+2) = 0, got {0}")]
    ZeroLambdaNonzeroK(u64),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("truncation orders are incompatible: {0}")]
    OrderMismatch(String),

    #[error("coefficient of T^{index} is not an integer: {value}")]
    NonIntegerCoefficient { index: usize, value: String },

    #[error("degree {degree} exceeds the factoring bound {bound}")]
    DegreeBound { degree: usize, bound: usize },

    #[error("root finding failed: {0}")]
    RootFindingFailure(String),

    #[error("member is singular: {0}")]
    SmoothnessGate(String),

    #[error("characteristic {p} divides the degree {degree}")]
    CharacteristicDividesDegree { p: u32, degree: u32 },

    #[error("independent counts disagree: {0}")]
    OracleMismatch(String),

    #[error("invariant violated: {0}")]
    InvariantViolated(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed cache data: {0}")]
    Cache(String),
}
