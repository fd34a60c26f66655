use thiserror::Error;

/// Process exit codes.
pub mod code {
    pub const OK: i32 = 0;
    pub const VALIDATION: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const EVALUATION: i32 = 3;
    pub const UNREACHABLE: i32 = 4;
    pub const CONVERGENCE: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed document, table or argument.
    #[error("{0}")]
    Parse(String),

    #[error("{0}")]
    Evaluation(String),

    #[error("{message}")]
    Unreachable { message: String },

    #[error("{0}")]
    Convergence(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Parse(msg.into())
    }

    pub fn code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => code::PARSE,
            CliError::Evaluation(_) => code::EVALUATION,
            CliError::Unreachable { .. } => code::UNREACHABLE,
            CliError::Convergence(_) => code::CONVERGENCE,
        }
    }

    /// Engine error raised while evaluating at `context`.
    pub fn engine(err: layerstack::Error, context: &str) -> Self {
        match err {
            layerstack::Error::Parse(m) => CliError::Parse(m),
            e @ layerstack::Error::Convergence { .. } => CliError::Convergence(format!("{context}: {e}")),
            e => CliError::Evaluation(format!("{context}: {e}")),
        }
    }
}
