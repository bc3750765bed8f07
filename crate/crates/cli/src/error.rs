//! Error type carrying the process exit code convention:
//! 1 usage, 2 data/validation, 3 numeric/convergence.

use std::fmt;

use tidemark_core::corpus::VocabularyError;
use tidemark_core::decompose::DecomposeError;
use tidemark_core::embed::TsneError;
use tidemark_core::sarimax::SarimaxError;
use tidemark_core::sentiment::LexiconError;
use tidemark_core::timegrid::TimegridError;
use tidemark_core::topics::LdaError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Numeric,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Usage => 1,
            ErrorKind::Data => 2,
            ErrorKind::Numeric => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ErrorKind::Usage => "usage",
            ErrorKind::Data => "data",
            ErrorKind::Numeric => "numeric",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Usage,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Data,
            message: message.into(),
        }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Numeric,
            message: message.into(),
        }
    }

    /// Machine-readable form for `--error-json`.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": { "kind": self.kind.name(), "message": self.message }
        })
        .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

pub type Result<T> = std::result::Result<T, CliError>;

pub fn io_error(context: &str, err: std::io::Error) -> CliError {
    CliError::data(format!("{context}: {err}"))
}

impl From<VocabularyError> for CliError {
    fn from(err: VocabularyError) -> Self {
        CliError::data(err.to_string())
    }
}

impl From<LexiconError> for CliError {
    fn from(err: LexiconError) -> Self {
        CliError::data(err.to_string())
    }
}

impl From<TimegridError> for CliError {
    fn from(err: TimegridError) -> Self {
        CliError::data(err.to_string())
    }
}

impl From<DecomposeError> for CliError {
    fn from(err: DecomposeError) -> Self {
        CliError::data(err.to_string())
    }
}

impl From<LdaError> for CliError {
    fn from(err: LdaError) -> Self {
        match err {
            LdaError::InvalidConfig(_) => CliError::usage(err.to_string()),
            _ => CliError::data(err.to_string()),
        }
    }
}

impl From<TsneError> for CliError {
    fn from(err: TsneError) -> Self {
        match err {
            TsneError::NonFiniteGradient { .. } => CliError::numeric(err.to_string()),
            TsneError::PerplexityTooLarge { .. } => CliError::usage(err.to_string()),
            _ => CliError::data(err.to_string()),
        }
    }
}

impl From<SarimaxError> for CliError {
    fn from(err: SarimaxError) -> Self {
        match err {
            SarimaxError::InvalidOrder(_) => CliError::usage(err.to_string()),
            SarimaxError::FitFailed { .. }
            | SarimaxError::AllCandidatesFailed { .. }
            | SarimaxError::ZeroVarianceResiduals => CliError::numeric(err.to_string()),
            _ => CliError::data(err.to_string()),
        }
    }
}
