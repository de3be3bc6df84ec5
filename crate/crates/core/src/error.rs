use thiserror::Error;

/// Errors raised by the transfer-matrix engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty product")]
    EmptyProduct,
    #[error("closed form requires lossless elements")]
    LossyClosedForm,
    #[error("singular transfer matrix")]
    SingularMatrix,
    #[error("no transmission points")]
    NoTransmissionPoints,
    #[error("branch must be +1 or -1, got {0}")]
    InvalidBranch(i64),
    #[error("bracket failure: {0}")]
    BracketFailure(String),
    #[error("flank not bracketed: {0}")]
    FlankNotBracketed(String),
    #[error("resonance tracking failed: {0}")]
    ResonanceTracking(String),
    #[error("unstable step: dt = {dt} exceeds {limit}")]
    UnstableStep { dt: f64, limit: f64 },
    #[error("zero profile")]
    ZeroProfile,
    #[error("negative absorption {0:e} exceeds rounding tolerance")]
    NegativeAbsorption(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to rejected input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::SingularMatrix
                | Error::BracketFailure(_)
                | Error::FlankNotBracketed(_)
                | Error::ResonanceTracking(_)
                | Error::NegativeAbsorption(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
