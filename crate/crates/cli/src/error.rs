use thiserror::Error;
use uec::bounds::BoundError;
use uec::codec::CodecError;
use uec::model::ModelError;
use uec::redundancy::RedundancyError;
use uec::shtarkov::ShtarkovError;

/// Exit status for a run that completed with every check passing.
pub const EXIT_OK: u8 = 0;
/// At least one verification check failed.
pub const EXIT_FAILED: u8 = 1;
/// Bad arguments or malformed input.
pub const EXIT_USAGE: u8 = 2;
/// The requested instance violates a precondition or is too large to evaluate.
pub const EXIT_INFEASIBLE: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("infeasible instance: {0}")]
    Infeasible(String),
    #[error("{failed} of {total} checks failed")]
    Failed { failed: usize, total: usize },
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed { .. } => EXIT_FAILED,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            _ => EXIT_USAGE,
        }
    }

    pub fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }
}

impl From<ShtarkovError> for CliError {
    fn from(e: ShtarkovError) -> Self {
        match e {
            ShtarkovError::Model(m) => CliError::Model(m),
            other => CliError::Infeasible(other.to_string()),
        }
    }
}

impl From<RedundancyError> for CliError {
    fn from(e: RedundancyError) -> Self {
        match e {
            RedundancyError::Model(m) => CliError::Model(m),
            RedundancyError::TooLarge { .. } | RedundancyError::TruncationMass(_) => {
                CliError::Infeasible(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<BoundError> for CliError {
    fn from(e: BoundError) -> Self {
        match e {
            BoundError::Model(m) => CliError::Model(m),
            other => CliError::Infeasible(other.to_string()),
        }
    }
}
