use thiserror::Error;

pub type Result<T> = std::result::Result<T, PmbsiError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PmbsiError {
    #[error("empty series")]
    EmptySeries,

    #[error("series too short: {valid} valid values, need at least {required}")]
    SeriesTooShort { valid: usize, required: usize },

    #[error("degenerate split: segment lengths ({train}, {eval}, {valid})")]
    DegenerateSplit { train: usize, eval: usize, valid: usize },

    #[error("window out of bounds: index {index} with series length {len}")]
    WindowOutOfBounds { index: usize, len: usize },

    #[error("positivity violated at index {index} (value {value})")]
    PositivityViolated { index: usize, value: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("length mismatch: {actual} actual values vs {forecast} forecasts")]
    LengthMismatch { actual: usize, forecast: usize },

    #[error("no points to score")]
    EmptyInput,

    #[error("empty range")]
    EmptyRange,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for PmbsiError {
    fn from(err: std::io::Error) -> Self {
        PmbsiError::Io(err.to_string())
    }
}

impl PmbsiError {
    /// Process exit code used by the CLI: 1 usage, 2 data, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            PmbsiError::InvalidParams(_) | PmbsiError::InvalidConfig(_) => 1,
            PmbsiError::Numerical(_) => 3,
            _ => 2,
        }
    }
}
