use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("point {point:?} lies outside {region}")]
    Domain { point: Vec<f64>, region: &'static str },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("function is not finite at node {node:?}")]
    Evaluation { node: Vec<f64> },

    #[error("growth violation: max ratio {ratio:e} at {witness:?} exceeds {limit:e}")]
    Growth { ratio: f64, witness: Vec<f64>, limit: f64 },

    #[error("no admissible sublevel index below the truncation radius {radius}; enlarge the radius")]
    Truncation { radius: f64 },

    #[error("operation requires a bounded domain equal to K; use growth_bound for unbounded domains")]
    Mode,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}
