use std::fmt;
use std::io;
use std::path::PathBuf;

use rotgpe_core::CoreError;

/// Everything a subcommand can fail with, partitioned by exit code:
/// configuration problems exit 2, numerical aborts exit 3, and a verify
/// table with failing rows exits 1.
#[derive(Debug)]
pub enum CliError {
    /// Bad config file, flag, or environment; carries the full message
    /// (line numbers included where they exist).
    Config(String),
    /// Filesystem trouble on a named path.
    Io { path: PathBuf, source: io::Error },
    /// The solver or integrator aborted mid-run.
    Numerical(CoreError),
    /// The core rejected the request up front (regime refusals, parameter
    /// contracts); user-fixable, so it shares the config exit code.
    Rejected(CoreError),
    /// Verification ran to completion and found failing checks.
    ChecksFailed { failed: usize, total: usize },
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed { .. } => 1,
            CliError::Config(_) | CliError::Io { .. } | CliError::Rejected(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(message) => write!(f, "{message}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Numerical(e) => write!(f, "numerical abort: {e}"),
            CliError::Rejected(e) => write!(f, "{e}"),
            CliError::ChecksFailed { failed, total } => {
                write!(f, "{failed} of {total} checks failed")
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NonFiniteDensity { .. }
            | CoreError::ComplexAngularMomentum { .. }
            | CoreError::FlowDiverged { .. }
            | CoreError::ShootingBracket { .. }
            | CoreError::ZeroMass
            | CoreError::NonFiniteField { .. }
            | CoreError::NumericalAbort { .. } => CliError::Numerical(e),
            other => CliError::Rejected(other),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_partition_the_failure_modes() {
        let failing_table = CliError::ChecksFailed { failed: 1, total: 5 };
        assert_eq!(failing_table.exit_code(), 1);
        assert_eq!(CliError::Config("bad".into()).exit_code(), 2);
        let missing = CliError::io("/tmp/x")(io::Error::new(io::ErrorKind::NotFound, "gone"));
        assert_eq!(missing.exit_code(), 2);
    }

    #[test]
    fn core_errors_split_into_rejections_and_aborts() {
        // Contract violations are user-fixable; mid-run failures are not.
        assert_eq!(CliError::from(CoreError::InvalidGridSize(7)).exit_code(), 2);
        assert_eq!(CliError::from(CoreError::ZeroMass).exit_code(), 3);
        assert_eq!(
            CliError::from(CoreError::NumericalAbort { step: 3 }).exit_code(),
            3
        );
    }

    #[test]
    fn io_errors_name_the_path() {
        let e = CliError::io("/data/run.ini")(io::Error::new(io::ErrorKind::NotFound, "gone"));
        assert!(e.to_string().contains("/data/run.ini"));
    }
}
