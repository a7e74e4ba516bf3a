use std::fmt;

/// A failure with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

pub const EXIT_CERTIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }

    pub fn io(context: &str, e: impl fmt::Display) -> Self {
        CliError { code: EXIT_USAGE, message: format!("{context}: {e}") }
    }
}

impl From<ruclab::Error> for CliError {
    fn from(e: ruclab::Error) -> Self {
        let code = match &e {
            e if e.is_numerical() => EXIT_NUMERICAL,
            ruclab::Error::Precondition(_) | ruclab::Error::NeedsRescaling { .. } => EXIT_CERTIFICATION,
            _ => EXIT_USAGE,
        };
        CliError { code, message: e.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
