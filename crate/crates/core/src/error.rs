use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument falls outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("zero-norm vector passed as `{0}`")]
    ZeroNorm(&'static str),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("evaluation error: {0}")]
    Eval(String),
    #[error("{path}: {source}")]
    Format {
        path: PathBuf,
        #[source]
        source: FormatError,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Embedding file validation failures. Offsets are byte positions in the file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("bad magic at offset {offset}: expected \"EMB1\", found {found:?}")]
    BadMagic { offset: usize, found: [u8; 4] },
    #[error("unsupported format version {version} at offset {offset}")]
    UnsupportedVersion { offset: usize, version: u32 },
    #[error("truncated file: need {needed} bytes, have {actual} (at offset {offset})")]
    Truncated {
        offset: usize,
        needed: usize,
        actual: usize,
    },
    #[error("trailing bytes: expected length {expected}, have {actual} (at offset {offset})")]
    TrailingBytes {
        offset: usize,
        expected: usize,
        actual: usize,
    },
    #[error("crc mismatch at offset {offset}: stored {stored:#010x}, computed {computed:#010x}")]
    CrcMismatch {
        offset: usize,
        stored: u32,
        computed: u32,
    },
    #[error("invalid header at offset {offset}: {reason}")]
    InvalidHeader { offset: usize, reason: String },
    #[error("label {label} of item {item} is >= class count {classes} (at offset {offset})")]
    LabelOutOfRange {
        offset: usize,
        item: usize,
        label: u32,
        classes: u32,
    },
    #[error("non-finite value in item {item} at offset {offset}")]
    NonFinite { offset: usize, item: usize },
}
