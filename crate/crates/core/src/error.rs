use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Operands have incompatible moduli, lengths or matrix shapes.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The operation needs a prime modulus.
    #[error("modulus {0} is not prime")]
    UnsupportedModulus(u32),

    /// The requested enumeration or dense matrix exceeds the desk-scale guard.
    #[error("resource guard: {what} needs {size} elements, limit is {limit}")]
    Resource {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    /// A value violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A stabilizer basis is not self-orthogonal.
    #[error("stabilizer vectors {0} and {1} have nonzero symplectic form {2}")]
    NotSelfOrthogonal(usize, usize, u32),

    /// A file or document failed to parse or validate. The first field names the offending field.
    #[error("field `{field}`: {message}")]
    Schema { field: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
