use thiserror::Error;

/// Errors raised by model construction, optimization, simulation and the
/// experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid slate: {0}")]
    InvalidSlate(String),

    #[error("position {position} out of range for slate of length {len}")]
    IndexOutOfRange { position: usize, len: usize },

    #[error("dimension mismatch: expected {expected} entries, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("instance too large: {orderings} orderings exceeds cap of {cap}")]
    Capacity { orderings: u128, cap: u128 },

    #[error("degenerate model: {0}")]
    ModelDegenerate(String),

    #[error("unknown preset `{0}` (expected one of I, II, III, IV)")]
    UnknownPreset(String),

    #[error("config parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad user input (config files, parameters),
    /// as opposed to runtime failures.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::Parse(_)
                | Error::UnknownPreset(_)
                | Error::Capacity { .. }
                | Error::Dimension { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
