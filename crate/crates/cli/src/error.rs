use thiserror::Error;

/// Error classes of a run, each with its own exit code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("config error{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, msg: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("numerical instability: {0}")]
    Instability(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("format error: {0}")]
    Format(String),
}

impl CliError {
    pub fn config(line: usize, msg: impl Into<String>) -> Self {
        CliError::Config { line: Some(line), msg: msg.into() }
    }

    /// 2 config, 3 precondition, 4 numeric instability, 5 I/O (including malformed files).
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Precondition(_) => 3,
            CliError::Instability(_) => 4,
            CliError::Io(_) | CliError::Format(_) => 5,
        }
    }

    pub fn class(&self) -> &'static str {
        match self {
            CliError::Config { .. } => "config",
            CliError::Precondition(_) => "precondition",
            CliError::Instability(_) => "instability",
            CliError::Io(_) => "io",
            CliError::Format(_) => "format",
        }
    }
}

impl From<field_core::Error> for CliError {
    fn from(e: field_core::Error) -> Self {
        match e {
            field_core::Error::Stability(_) => CliError::Instability(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
