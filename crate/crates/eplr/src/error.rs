use thiserror::Error;

/// Errors reported by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomial bases differ: {0} vs {1}")]
    BaseMismatch(u32, u32),

    #[error("modulus must be nonzero")]
    ZeroModulus,

    #[error("irreducibility is only defined for polynomials of degree >= 1")]
    DegreeOutOfRange,

    #[error("polynomial {0} is not irreducible over F_{1}")]
    NotIrreducible(String, u32),

    #[error("deg(q) = {got} must be smaller than deg(p) = {modulus}; reduce mod p first")]
    LaurentDegree { got: i64, modulus: i64 },

    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),

    #[error("lambda = {lambda} outside the admissible range (1/{alpha}, 1]")]
    InvalidLambda { lambda: f64, alpha: u32 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("weight model supplies {got} weights but dimension {needed} was requested")]
    NotEnoughWeights { needed: usize, got: usize },

    #[error("rule chain invalid: {0}")]
    InvalidChain(String),

    #[error("resource budget exceeded: {0}")]
    ResourceBudget(String),

    #[error("general (non-product) weights are not supported by the CBC construction")]
    GeneralWeightsUnsupported,

    #[error("unknown integrand '{0}'")]
    UnknownIntegrand(String),

    #[error("component has no discrete logarithm (zero polynomial)")]
    NoLogarithm,

    #[error("cannot parse weights '{spec}': {reason}")]
    ParseWeights { spec: String, reason: String },

    #[error("rule file line {line}: {reason}")]
    ParseRuleFile { line: usize, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
