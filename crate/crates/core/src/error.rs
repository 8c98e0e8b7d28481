use thiserror::Error;

/// Errors raised by the library. Variants are deliberately coarse; the
/// attached strings carry the instance detail.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is even; only odd moduli are supported")]
    EvenModulus(u64),
    #[error("value exceeds configured limit: {0}")]
    Overflow(String),
    #[error("{0} is not a unit modulo the prime power")]
    NotAUnit(u64),
    #[error("arguments are not coprime: {0}")]
    NotCoprime(String),
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("division by zero")]
    ZeroDenominator,
    #[error("bad reduction modulo {0}: a coefficient has {0} in its denominator")]
    BadReduction(u64),
    #[error("the zero function is not allowed here")]
    ZeroFunction,
    #[error("function vanishes identically modulo {0}")]
    ZeroModP(u64),
    #[error("modulus split is not coprime: {0}")]
    NotCoprimeSplit(String),
    #[error("expression undefined at the given point modulo {0}")]
    UndefinedAt(u64),
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("f and g are both constant")]
    DegenerateBoth,
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("modulus is not smooth enough: {0}")]
    NotSmooth(String),
    #[error("modulus shares a factor with the exceptional modulus: {0}")]
    SharedFactorWithM(String),
    #[error("polynomial degree must be at least 2")]
    DegreeTooSmall,
    #[error("character is principal")]
    PrincipalCharacter,
    #[error("invalid character specification: {0}")]
    CharSpec(String),
    #[error("split invariant failed: {0}")]
    SplitInvariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
