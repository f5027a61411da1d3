use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("field of size {p}^{degree} exceeds the enumeration cap of {cap} elements")]
    FieldTooLarge { p: u64, degree: u64, cap: u64 },

    #[error("invalid field parameters: {0}")]
    InvalidField(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("0^0 is ill-posed for a field exponent")]
    ZeroToZero,

    #[error("malformed element: {0}")]
    MalformedElement(String),

    #[error("map is not a bijection")]
    NotBijective,

    #[error("matrix is singular")]
    Singular,

    #[error("expected rank {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("gcd({a}, {b}) = {gcd} is not 1")]
    NotCoprime { a: u64, b: u64, gcd: u64 },

    #[error("parameter precondition violated: {0}")]
    Precondition(String),

    #[error("closed-form inverse failed pointwise validation: {0}")]
    InverseValidation(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
