use std::fmt;
use std::path::Path;
use std::process::ExitCode;

/// Failure classes with distinct exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Io(_) => 4,
        })
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    /// Attaches the offending file to a library error.
    pub fn at(path: &Path, e: recur::Error) -> Self {
        match CliError::from(e) {
            CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
            CliError::Io(m) => CliError::Io(format!("{}: {m}", path.display())),
            usage => usage,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Validation(m) => write!(f, "invalid: {m}"),
            CliError::Io(m) => write!(f, "i/o: {m}"),
        }
    }
}

impl From<recur::Error> for CliError {
    fn from(e: recur::Error) -> Self {
        match e {
            recur::Error::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
