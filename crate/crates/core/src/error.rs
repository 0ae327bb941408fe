use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension must be at least 1")]
    EmptyDimension,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("triangular matrix is singular: zero diagonal entry at index {index}")]
    Singular { index: usize },
    #[error("matrix is not positive definite: non-positive pivot at index {index}")]
    NotPositiveDefinite { index: usize },
    #[error("strategy {strategy} is not admissible for {kernel}; admissible: {admissible}")]
    InadmissibleStrategy {
        kernel: String,
        strategy: String,
        admissible: String,
    },
    #[error("unknown strategy '{0}'")]
    UnknownStrategy(String),
    #[error("unknown kernel '{0}'")]
    UnknownKernel(String),
    #[error("unknown shape case '{0}'")]
    UnknownShape(String),
    #[error("weight list is empty")]
    EmptyWeights,
    #[error("weights must be positive and finite")]
    InvalidWeight,
    #[error("no serial rate given for core class '{0}'")]
    MissingClassRate(String),
    #[error("pivot {pivot} at position {position} is out of range for {rows} rows")]
    PivotOutOfRange {
        position: usize,
        pivot: usize,
        rows: usize,
    },
    #[error("invalid machine model: {0}")]
    InvalidMachine(String),
    #[error("invalid blocking parameters: {0}")]
    InvalidParams(String),
    #[error("simulation requires a machine in simulated mode")]
    NotSimulated,
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
