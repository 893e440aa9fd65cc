use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error at row {row}: {message}")]
    Csv { row: usize, message: String },

    #[error("row {row} has {found} columns, expected {expected}")]
    RaggedRow { row: usize, expected: usize, found: usize },

    #[error("row {row}, column {column}: cannot parse {cell:?} as a number")]
    NonNumeric { row: usize, column: usize, cell: String },

    #[error("row {row}, column {column}: value {cell:?} is not finite")]
    NonFinite { row: usize, column: usize, cell: String },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("invalid point set: {0}")]
    InvalidPointSet(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("label length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("eigensolver did not converge after {iterations} restarts; worst residual {worst_residual:e}")]
    NotConverged {
        iterations: usize,
        worst_residual: f64,
        residuals: Vec<f64>,
    },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Short machine-readable tag for the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Csv { .. } => "csv",
            Error::RaggedRow { .. } => "ragged_row",
            Error::NonNumeric { .. } => "non_numeric",
            Error::NonFinite { .. } => "non_finite",
            Error::Empty(_) => "empty",
            Error::InvalidPointSet(_) => "invalid_point_set",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::NotConverged { .. } => "not_converged",
            Error::Parse { .. } => "parse",
        }
    }
}
