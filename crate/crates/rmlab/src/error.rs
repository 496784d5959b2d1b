use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("field of size {0} exceeds the supported encoding range")]
    FieldTooLarge(u128),
    #[error("operation requires discrete-log tables, unavailable for a field of size {0}")]
    NoTables(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} does not divide {1}")]
    NotADivisor(usize, usize),
    #[error("element {0} is not a square at level {1}")]
    NotASquare(u64, usize),
    #[error("geometry unsupported: requires odd q")]
    EvenCharacteristic,
    #[error("invalid family parameter: {0}")]
    InvalidFamily(String),
    #[error("basis is F_q-dependent")]
    DependentBasis,
    #[error("equivalence decision inconclusive: {0}")]
    Inconclusive(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
