use thiserror::Error;

/// Failures raised by the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhaseError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite {quantity} at {location}")]
    NonFinite { quantity: &'static str, location: String },

    #[error("connection not self-adjoint at given resolution (Re = {real:e}, Im = {imag:e})")]
    NotSelfAdjoint { real: f64, imag: f64 },

    #[error("gauge singularity at g = 0 (t = {t})")]
    GaugeSingularity { t: f64 },

    #[error("zero-energy threshold state unsupported")]
    ThresholdState,

    #[error("circuit is not closed: {0}")]
    OpenCircuit(String),

    #[error("interaction does not switch off: {0}")]
    InteractionNotSwitchedOff(String),

    #[error("sweep enters the excluded discrete-spectrum band at k = {offending:?}")]
    ExcludedBand { offending: Vec<f64> },

    #[error("box under-resolves the band: {modes} modes inside, need at least {required}")]
    UnderResolved { modes: usize, required: usize },

    #[error("step size insufficient (norm drift {drift:e})")]
    StepSizeInsufficient { drift: f64 },

    #[error("wave packet reached the grid boundary (edge weight {edge_weight:e})")]
    PacketAtBoundary { edge_weight: f64 },

    #[error("operation not supported by this model: {0}")]
    Unsupported(&'static str),
}

pub type Result<T> = std::result::Result<T, PhaseError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(PhaseError::InvalidInput(msg.into()))
}

pub(crate) fn check_finite(value: f64, quantity: &'static str, location: impl FnOnce() -> String) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(PhaseError::NonFinite { quantity, location: location() })
    }
}
