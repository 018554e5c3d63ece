use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("score vector must have at least one entry")]
    EmptyScores,

    #[error("score entry {index} is not finite ({value})")]
    NonFiniteScore { index: usize, value: f64 },

    #[error("epsilon must be a positive finite number, got {0}")]
    InvalidEpsilon(f64),

    #[error("tie tolerance must be a nonnegative finite number, got {0}")]
    InvalidTieTolerance(f64),

    #[error("class index {index} out of range for {classes} classes")]
    ClassOutOfRange { index: usize, classes: usize },

    #[error("selection sets have different universes ({left} vs {right})")]
    UniverseMismatch { left: usize, right: usize },

    #[error("bisection failed to bracket a root on [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("subbagging needs m <= n, got m = {m}, n = {n}")]
    BagTooLarge { m: usize, n: usize },

    #[error("bag size and number of bags must be positive")]
    EmptyBagScheme,

    #[error("p_nm = 1 (every bag contains every point); the stability bound is unbounded")]
    UnboundedStability,

    #[error("stability bound needs {0}")]
    BoundPrecondition(&'static str),

    #[error("base learner failed on bag {bag}: {source}")]
    BagFit {
        bag: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("cannot drop a row from a dataset with a single row")]
    DropLastRow,

    #[error("row index {index} out of range for {rows} rows")]
    RowOutOfRange { index: usize, rows: usize },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("{0} must not be empty")]
    EmptySequence(&'static str),

    #[error("cannot draw {k} leave-one-out indices from {n} rows")]
    TooManyDraws { k: usize, n: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
