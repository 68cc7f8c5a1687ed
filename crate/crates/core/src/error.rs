use thiserror::Error;

use crate::simulator::SimPath;

pub type Result<T> = std::result::Result<T, HawkesError>;

#[derive(Debug, Error)]
pub enum HawkesError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unsupported case: {0}")]
    UnsupportedCase(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    /// The simulator hit its event cap; the truncated path is attached.
    #[error("event cap of {cap} events exceeded at t = {time}")]
    EventCapExceeded {
        cap: u64,
        time: f64,
        partial: Box<SimPath>,
    },

    #[error("query time {t} outside [0, {horizon}]")]
    QueryOutOfRange { t: f64, horizon: f64 },

    #[error("exponential moment diverges: -theta = {neg_theta} >= theta_c(t) = {theta_c}")]
    BeyondCriticalThreshold { neg_theta: f64, theta_c: f64 },

    #[error("wrong regime: expected {expected}, found {found}")]
    WrongRegime { expected: String, found: String },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl HawkesError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        HawkesError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
