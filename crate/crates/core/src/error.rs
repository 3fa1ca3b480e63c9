use thiserror::Error;

/// Errors raised by the kinematics, integrators and time-map routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scalar argument lies outside the domain of the operation.
    #[error("{quantity} = {value} is outside the allowed domain: {constraint}")]
    Domain {
        quantity: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// Inputs expressed in different inertial frames were combined.
    #[error("frame mismatch: expected `{expected}`, found `{found}`")]
    FrameMismatch { expected: String, found: String },

    /// A value that must be finite was NaN or infinite.
    #[error("non-finite {quantity}")]
    NonFinite { quantity: String },

    /// Worldline sample times are not strictly increasing.
    #[error("worldline time not strictly increasing at sample {index}")]
    NonMonotonicTime { index: usize },

    /// A sampled or integrated speed reached or exceeded c.
    #[error("superluminal speed |u| = {speed} at t = {t}")]
    Superluminal { t: f64, speed: f64 },

    /// Every 4-force component vanished, so no time-map ratio is defined.
    #[error("zero 4-force at t' = {t_prime}: every component is below the degeneracy threshold")]
    ZeroFourForce { t_prime: f64 },

    /// Component-wise time-map ratios disagree.
    #[error("g_{index} = {value} disagrees with reference {reference} at t' = {t_prime}")]
    InconsistentRatio {
        t_prime: f64,
        index: usize,
        value: f64,
        reference: f64,
    },

    /// Two worldlines were expected to share a time grid.
    #[error("time grids differ at sample {index}")]
    GridMismatch { index: usize },

    /// A periodic worldline was required.
    #[error("worldline is not periodic with period {period}: velocity mismatch {mismatch}")]
    NonPeriodic { period: f64, mismatch: f64 },

    /// The requested interval is not covered by the samples.
    #[error("interval [{start}, {end}] is not covered by samples spanning [{first}, {last}]")]
    OutOfRange {
        start: f64,
        end: f64,
        first: f64,
        last: f64,
    },

    /// A tensor was not antisymmetric.
    #[error("field tensor is not antisymmetric (max asymmetry {asymmetry})")]
    NotAntisymmetric { asymmetry: f64 },

    /// Parameters that must be shared between two inputs differ.
    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),

    /// Not enough samples for the requested operation.
    #[error("need at least {required} samples, got {found}")]
    TooFewSamples { required: usize, found: usize },

    /// Malformed serialized input.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn ensure_finite(quantity: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite {
            quantity: quantity.to_string(),
        })
    }
}
