use thiserror::Error;

/// Errors produced by grid construction, counting, and the minimization pipeline.
#[derive(Debug, Error)]
pub enum CvmError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid swap: cell ({0}, {1}) must hold state A and cell ({2}, {3}) state B")]
    InvalidSwap(usize, usize, usize, usize),

    #[error("cell index ({0}, {1}) out of range for {2}x{3} grid")]
    OutOfRange(usize, usize, usize, usize),

    #[error("degenerate composition: grid has no units in state {0}")]
    DegenerateComposition(char),

    #[error("grid parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("oracle size guard exceeded: {n} units (limit {limit})")]
    OracleSizeExceeded { n: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CvmError>;
