use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{value} is not a unit modulo {modulus}")]
    NotAUnit { value: u64, modulus: u64 },

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),

    #[error("cyclotomic order {0} is not supported (need a power of two or an odd prime)")]
    UnsupportedOrder(u64),

    #[error("cannot combine cyclotomic orders {left} and {right}")]
    OrderMismatch { left: u64, right: u64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("backend mismatch: cannot mix exact and float matrices")]
    BackendMismatch,

    #[error("{0} is not available on the exact backend")]
    UnsupportedBackend(&'static str),

    #[error("determinant of ({a},{b},{c},{d}) is {det} mod {modulus}, expected 1")]
    BadDeterminant {
        a: u64,
        b: u64,
        c: u64,
        d: u64,
        det: u64,
        modulus: u64,
    },

    #[error("{what}: {size} exceeds the limit {limit}")]
    TooLarge {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("modulus {0} is even; division by 2 is undefined")]
    EvenModulus(u64),

    #[error("branch precondition violated: {0}")]
    BadBranch(String),

    #[error("generic Weil formula needs c != 0")]
    NonGeneric,

    #[error("operator is ill-formed for this element: {0}")]
    IllFormed(String),

    #[error("operator does not satisfy the conjugation identity at (k,l) = ({k},{l})")]
    NotMetaplectic { k: u64, l: u64 },

    #[error("unknown suite {0:?}")]
    UnknownSuite(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("unreachable decomposition branch for ({a},{b},{c},{d}) mod {modulus}")]
    Unreachable {
        a: u64,
        b: u64,
        c: u64,
        d: u64,
        modulus: u64,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
