//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid or inconsistent parameters (bad `H`/`r`, gain out of range, ...).
    #[error("invalid parameters: {0}")]
    Parameter(String),

    /// An id or index outside its valid range.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// An exhaustive enumeration would exceed the configured cap.
    /// Raise `COMBICACHE_MAX_ENUM` to override the default of 10^7.
    #[error(
        "enumeration of {needed} items exceeds cap {cap}; set COMBICACHE_MAX_ENUM to raise it"
    )]
    EnumerationCap { needed: num::BigUint, cap: u64 },

    /// File size not divisible by the layout's required block size.
    #[error("file size {given} bytes is not a multiple of the required block size {required}")]
    BlockSize { given: usize, required: usize },

    /// Erasure-codec misuse: wrong share counts, duplicate indices,
    /// mismatched or odd symbol lengths.
    #[error("codec error: {0}")]
    Codec(String),

    /// I/O failure while writing CLI output.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// JSON serialization failure in CLI output paths.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
