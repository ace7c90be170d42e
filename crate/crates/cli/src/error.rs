use std::fmt;
use std::path::Path;

/// An error with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

pub const EXIT_COMPUTATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn computation(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_COMPUTATION,
            message: message.into(),
        }
    }

    /// Maps a library error raised while handling `path`.
    pub fn at(path: &Path) -> impl FnOnce(knownet::Error) -> CliError + '_ {
        move |e| match e {
            knownet::Error::Parse { line, message } => CliError::usage(format!("{}:{line}: {message}", path.display())),
            knownet::Error::Io(io) => CliError::usage(format!("{}: {io}", path.display())),
            other => {
                let mut err = CliError::from(other);
                err.message = format!("{}: {}", path.display(), err.message);
                err
            }
        }
    }
}

impl From<knownet::Error> for CliError {
    fn from(e: knownet::Error) -> Self {
        use knownet::Error as E;
        let code = match e {
            E::EmptyGraph | E::RepairFailed { .. } | E::Infeasible { .. } => EXIT_COMPUTATION,
            _ => EXIT_USAGE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::computation(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::computation(format!("json error: {e}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
