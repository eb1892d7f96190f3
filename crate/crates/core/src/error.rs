use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} is outside the permutation domain [0, {universe})")]
    OutOfDomain { value: u64, universe: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("batmaps come from different collections: {0}")]
    Mismatch(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("collection file: {0}")]
    Format(#[from] FormatError),

    #[error("collection needs {required} bytes, budget is {budget}")]
    Resource { required: u64, budget: u64 },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Structural problems found while decoding a collection file.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("bad magic {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("unsupported version {0}")]
    UnsupportedVersion(u8),
    #[error("truncated while reading {0}")]
    Truncated(&'static str),
    #[error("{0}")]
    Inconsistent(String),
}
