use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid sign entry {value} at ({row}, {col}); entries must be -1 or +1")]
    InvalidEntry { row: usize, col: usize, value: i64 },

    #[error("not a permutation: {0}")]
    NotPermutation(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    /// Two independently computed quantities that must agree did not.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("{what} needs n <= {limit}, got n = {n}")]
    OverBudget {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("{what} timed out after {elapsed_ms} ms")]
    Timeout { what: &'static str, elapsed_ms: u128 },

    #[error("factor has {found} switcher C4 components, needs at least {required}")]
    TooFewSwitchers { found: usize, required: f64 },

    #[error("{stage}: {message}")]
    Construction { stage: &'static str, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
