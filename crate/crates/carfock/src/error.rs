use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode order is invalid: {0}")]
    BadModeOrder(String),

    #[error("unknown mode `{0}`")]
    UnknownMode(String),

    #[error("mode `{0}` listed more than once")]
    DuplicateMode(String),

    #[error("orders are not permutations of each other: [{0}] vs [{1}]")]
    OrderMismatch(String, String),

    #[error("state is zero; {0} is undefined")]
    ZeroState(&'static str),

    #[error("state is not normalized: norm {0}")]
    NotNormalized(f64),

    #[error("matrix is {found}, expected {expected}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not Hermitian: max |A - A^dagger| entry {0:e}")]
    NotHermitian(f64),

    #[error("trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("matrix is not positive semidefinite: eigenvalue {0:e}")]
    NotPositive(f64),

    #[error("operation needs {expected} modes, state has {found}")]
    WrongModeCount { expected: usize, found: usize },

    #[error("parity superselection violated: {0}")]
    SsrViolation(String),

    #[error("parameter {name} = {value} outside [{lo}, {hi}]")]
    ParamRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("Kraus set invalid: {0}")]
    BadChannel(String),

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("optimization failed: {0}")]
    Optimization(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }
}
