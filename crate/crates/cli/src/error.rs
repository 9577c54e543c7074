use std::path::PathBuf;

use thiserror::Error;

use crate::expr::{EvalError, SyntaxError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERDICT: u8 = 2;
pub const EXIT_CONFIG: u8 = 64;
pub const EXIT_GROWTH: u8 = 65;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },

    #[error("expression `{text}`: {source}")]
    Syntax { text: String, source: SyntaxError },

    #[error("expression `{text}` at u = {node:?}: {source}")]
    Evaluation { text: String, node: Vec<f64>, source: EvalError },

    #[error("probe `{label}` is outside the growth class: ratio {ratio:e} at {witness:?}")]
    RejectedProbe { label: String, ratio: f64, witness: Vec<f64> },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Core(#[from] korovkin::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use korovkin::Error as E;
        match self {
            CliError::Evaluation { .. } | CliError::RejectedProbe { .. } => EXIT_GROWTH,
            CliError::Core(E::Growth { .. } | E::Truncation { .. } | E::Evaluation { .. }) => EXIT_GROWTH,
            _ => EXIT_CONFIG,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
