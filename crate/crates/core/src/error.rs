use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ground set must contain at least one element")]
    EmptyGroundSet,
    #[error("ground set of size {0} exceeds the supported maximum of 64 elements")]
    GroundSetTooLarge(usize),
    #[error("invalid biset: {0}")]
    InvalidBiset(String),
    #[error("ternary entry {value} at position {index} is not one of -1, 0, +1")]
    InvalidTernary { index: usize, value: i64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite input at position {0}")]
    NonFinite(usize),
    #[error("{op} refuses n = {n} (maximum {max})")]
    TooLarge { op: &'static str, n: usize, max: usize },
    #[error("no biset satisfies the feasibility predicate")]
    NoFeasibleBiset,
    #[error("oracle failure: {0}")]
    Oracle(String),
    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },
    #[error("duplicate reading for location {location}, timestep {timestep}")]
    DuplicateKey { location: u64, timestep: u64 },
    #[error("incomplete grid: location {location} has no reading at timestep {timestep}")]
    IncompleteGrid { location: u64, timestep: u64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("master problem is infeasible")]
    Infeasible,
    #[error("internal solver error: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
