use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| exceeds tolerance")]
    NotSymmetric { row: usize, col: usize },

    #[error("matrix is not positive definite (pivot {index} is {pivot})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: unsupported IDX element type (magic {magic:#010x})")]
    IdxMagic { path: PathBuf, magic: u32 },

    #[error("{path}: truncated file (expected {expected} bytes, found {actual})")]
    Truncated {
        path: PathBuf,
        expected: u64,
        actual: u64,
    },

    #[error("label count {labels} does not match image count {images}")]
    CountMismatch { images: usize, labels: usize },

    #[error("{path}: truncated CIFAR-10 record at byte offset {offset} (file length {len} is not a multiple of 3073)")]
    CifarTruncated {
        path: PathBuf,
        offset: u64,
        len: u64,
    },

    #[error("{path}: label byte {label} at byte offset {offset} is not in 0..=9")]
    CifarLabel {
        path: PathBuf,
        offset: u64,
        label: u8,
    },

    #[error("{path}:{line}: {message}")]
    Csv {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("class {class} has {available} examples, {requested} requested")]
    InsufficientExamples {
        class: i64,
        available: usize,
        requested: usize,
    },

    #[error("{path}: bad distance cache: {message}")]
    DistanceCache { path: PathBuf, message: String },

    #[error("matching of size {matching} is not maximum (dual value check failed)")]
    NotMaximum { matching: usize },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
