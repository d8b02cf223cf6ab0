use thiserror::Error;

/// Errors produced anywhere in the cipher pipeline.
///
/// The envelope-level variants (`Authentication`, `Corruption`, `Parse`) are
/// kept distinct so callers can map them onto separate exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("argument out of range: {0}")]
    Range(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("invalid key: {0}")]
    InvalidKey(String),

    #[error("no nonsingular enciphering matrix after {0} attempts")]
    KeyDerivation(u32),

    #[error("corrupt compressed stream: {0}")]
    CorruptStream(String),

    #[error("ciphertext entry exceeds the signed 64-bit wire range")]
    Overflow,

    #[error("corrupted ciphertext: {0}")]
    Corruption(String),

    #[error("authentication failed: data attack")]
    Authentication,

    #[error("malformed envelope: {0}")]
    Parse(String),

    #[error("statistics error: {0}")]
    Statistics(String),

    #[error("attack failed: {0}")]
    Attack(String),
}

pub type Result<T> = std::result::Result<T, Error>;
