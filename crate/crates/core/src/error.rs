use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("value out of range: {0}")]
    Range(String),
    #[error("invalid parameters: {0}")]
    Param(String),
    #[error("gaussian width too small: {0}")]
    Width(String),
    #[error("sampling budget exhausted: {0}")]
    Budget(String),
    #[error("malformed encoding: {0}")]
    Decode(String),
    #[error("integrity check failed: {0}")]
    Integrity(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("witness does not satisfy statement: {0}")]
    Witness(String),
    #[error("one-time signing key already used")]
    KeyConsumed,
    #[error("signing key has no remaining leaves")]
    KeyExhausted,
    #[error("registry error: {0}")]
    Registry(String),
    #[error("rejected: {0}")]
    Rejected(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
