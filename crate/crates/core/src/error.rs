use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("a tape needs at least one cell")]
    EmptyTape,
    #[error("gate width {0} is not supported (expected 2, 3 or 4)")]
    GateWidth(usize),
    #[error("gate table of width {width} is not a permutation of the {width}-bit tuples")]
    InvalidGate { width: usize },
    #[error("spacing {spacing} does not divide tape length {len}")]
    Spacing { spacing: usize, len: usize },
    #[error("{0} is not a perfect cube")]
    NotCube(usize),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid pulse: {0}")]
    InvalidPulse(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(
        "cannot reach bias {target} from {epsilon}: predicted survivors fall to {survivors:.2} after {rounds} rounds"
    )]
    InsufficientBits { epsilon: f64, target: f64, rounds: usize, survivors: f64 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
