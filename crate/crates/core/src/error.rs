use thiserror::Error;

/// Errors reported by matrix construction, arithmetic and serialization.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported word width {0} (expected one of 8, 16, 32, 64)")]
    InvalidWordWidth(u32),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index ({row}, {col}) out of range for {n_rows}x{n_cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },

    #[error("row {row} out of range for matrix with {n_rows} rows")]
    RowOutOfRange { row: usize, n_rows: usize },

    #[error("word-column range {from}..{to} invalid for matrix with {n_word_cols} word-columns")]
    WordColumnRange {
        from: usize,
        to: usize,
        n_word_cols: usize,
    },

    #[error("table splits sum to {got}, expected {expected}")]
    SplitMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("matrix is not unit lower triangular: {0}")]
    NotUnitLowerTriangular(String),

    #[error("malformed matrix file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
