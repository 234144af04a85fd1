use alloc::string::String;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix must have at least one row and one column (got {rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("expected {expected} values for a {rows}x{cols} matrix, got {found}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric: entries ({i}, {j}) and ({j}, {i}) differ by {diff:e}")]
    NotSymmetric { i: usize, j: usize, diff: f64 },

    #[error("requested {requested} eigenpairs of a {n}x{n} matrix")]
    TooManyEigenpairs { requested: usize, n: usize },

    #[error("eigensolver did not converge")]
    NoConvergence,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("neighborhood graph is disconnected ({components} components)")]
    DisconnectedGraph { components: usize },

    #[error("image is {width}x{height}; this descriptor needs {requirement}")]
    ImageTooSmall {
        width: usize,
        height: usize,
        requirement: &'static str,
    },

    #[error("label {label} out of range for a vocabulary of {vocabulary} concepts (image {image})")]
    LabelOutOfRange {
        image: usize,
        label: usize,
        vocabulary: usize,
    },

    #[error("{remaining} of {total} images left after pruning with minimum label count {prune_min}; need at least 2")]
    TooFewAfterPruning {
        total: usize,
        remaining: usize,
        prune_min: usize,
    },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
