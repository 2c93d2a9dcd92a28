use std::path::PathBuf;

use thiserror::Error;

/// Failures of the command-line runner, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{line}:{col}: parse error: {message}")]
    Parse { line: usize, col: usize, message: String },

    #[error("{}invalid `{key}`: {message}", position_prefix(*.line, *.col))]
    Validation { key: String, message: String, line: Option<usize>, col: Option<usize> },

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{context}: {source}")]
    Numerical { context: String, source: qsl_core::Error },

    #[error("{context}: invariant violated: {message}")]
    Invariant { context: String, message: String },
}

fn position_prefix(line: Option<usize>, col: Option<usize>) -> String {
    match (line, col) {
        (Some(l), Some(c)) => format!("{l}:{c}: "),
        _ => String::new(),
    }
}

impl CliError {
    /// 1 config or I/O error, 2 numerical failure, 3 invariant violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse { .. } | Self::Validation { .. } | Self::Io { .. } => 1,
            Self::Numerical { .. } => 2,
            Self::Invariant { .. } => 3,
        }
    }

    /// Wraps a core error; speed-limit violations and stabilizer mismatches
    /// are invariant failures, everything else is numerical.
    pub fn from_core(context: impl Into<String>, source: qsl_core::Error) -> Self {
        let context = context.into();
        match source {
            qsl_core::Error::ViolationDetected { .. } | qsl_core::Error::CrossCheckMismatch(_) => {
                Self::Invariant { context, message: source.to_string() }
            }
            source => Self::Numerical { context, source },
        }
    }

    /// Validation error without a source position.
    pub fn validation_error(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self::validation(key, message, None)
    }

    pub(crate) fn validation(key: impl Into<String>, message: impl Into<String>, pos: Option<(usize, usize)>) -> Self {
        Self::Validation { key: key.into(), message: message.into(), line: pos.map(|p| p.0), col: pos.map(|p| p.1) }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_class() {
        let violation = qsl_core::Error::ViolationDetected { theta: 1.0, rate: 2.0, bound: 1.0 };
        assert_eq!(CliError::from_core("bound_check", violation).exit_code(), 3);
        let mismatch = qsl_core::Error::CrossCheckMismatch("stage c".into());
        assert_eq!(CliError::from_core("counterexample", mismatch).exit_code(), 3);
        assert_eq!(CliError::from_core("x", qsl_core::Error::ConvergenceFailure).exit_code(), 2);
        assert_eq!(CliError::validation_error("kind", "missing").exit_code(), 1);
        let e = CliError::validation("parameters.g", "missing required key", Some((3, 1)));
        assert_eq!(e.to_string(), "3:1: invalid `parameters.g`: missing required key");
    }
}
