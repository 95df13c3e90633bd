use thiserror::Error;

use slhash::algebra::AlgebraError;
use slhash::analysis::AnalysisError;
use slhash::attacks::AttackError;
use slhash::hasher::HashError;
use slhash::params::ParamError;
use slhash::tails::TailError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<HashError> for CliError {
    fn from(e: HashError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<TailError> for CliError {
    fn from(e: TailError) -> Self {
        match e {
            TailError::NoWorkers => CliError::Usage(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::GroupTooLarge { .. } | AnalysisError::NotEnumerable { .. } => CliError::Budget(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<AttackError> for CliError {
    fn from(e: AttackError) -> Self {
        match e {
            AttackError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}
