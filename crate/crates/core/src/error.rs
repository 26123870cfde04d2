use thiserror::Error;

use crate::spin_model::SpinLevel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid population vector: {0}")]
    Population(String),

    #[error("invalid transition pair {0} <-> {1}")]
    InvalidPair(SpinLevel, SpinLevel),

    #[error("steady state is not unique when k_i = 0")]
    NonUniqueSteadyState,

    #[error("calibration spectrum is missing the m_I = {mi} line (height {height:.3e})")]
    MissingCalibration { mi: i8, height: f64 },

    #[error("line m_I = {mi} at {freq_mhz} MHz lies off the spectrum grid")]
    PeakOffGrid { mi: i8, freq_mhz: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        reason: reason.into(),
    }
}
