use std::fmt;
use std::process::ExitCode;

use permres::algebra::AlgebraError;
use permres::equivalence::EquivalenceError;
use permres::families::FamilyError;
use permres::input::InputError;
use permres::solver::SolverError;
use permres::stats::StatsError;

/// Failures, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, specs or inputs: exit 2.
    Usage(String),
    /// A checked identity or witness failed, i.e. a defect: exit 3.
    Identity(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Identity(_) => ExitCode::from(3),
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Identity(m) => write!(f, "internal identity violation: {m}"),
        }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<EquivalenceError> for CliError {
    fn from(e: EquivalenceError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        match e {
            StatsError::IdentityViolation(m) => CliError::Identity(m),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Internal(m) => CliError::Identity(m),
            SolverError::Stats(s) => s.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::Witness(m) => CliError::Identity(m),
            FamilyError::Solver(s) => s.into(),
            FamilyError::Stats(s) => s.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
