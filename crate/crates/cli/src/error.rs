use thiserror::Error;

/// Failures of a CLI command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numeric failure: {0}")]
    Numeric(chronodyn::Error),

    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<chronodyn::Error> for CliError {
    fn from(e: chronodyn::Error) -> Self {
        match e {
            chronodyn::Error::Io(msg) => CliError::Io(msg),
            chronodyn::Error::Parse(msg) => CliError::Config(msg),
            other => CliError::Numeric(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
