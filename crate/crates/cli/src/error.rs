use thiserror::Error;

/// Failures surfaced by the command-line front end, each with a fixed exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("solver: {0}")]
    Solver(String),
    #[error("oracle: {0}")]
    Oracle(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 config or I/O error, 2 solver failure, 3 oracle failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Solver(_) => 2,
            CliError::Oracle(_) => 3,
        }
    }
}

impl From<ringecho::Error> for CliError {
    fn from(e: ringecho::Error) -> Self {
        match e {
            ringecho::Error::InvalidParameter { .. } => CliError::Config(e.to_string()),
            ringecho::Error::Integration { .. } => CliError::Oracle(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}
