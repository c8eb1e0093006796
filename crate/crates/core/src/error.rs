use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("signal must contain at least one sample")]
    EmptySignal,
    #[error("sample rate must be positive")]
    ZeroSampleRate,
    #[error("sample rate {0} Hz is odd; half-rate resampling needs an even rate")]
    OddSampleRate(u32),
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("input too short: need at least {min} samples, got {actual}")]
    TooShort { min: usize, actual: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },
    /// The sequence has too few extrema to build envelopes; it is a residue.
    #[error("monotonic residue: no further IMF can be extracted")]
    MonotonicResidue,
    #[error("malformed network: {0}")]
    MalformedNetwork(&'static str),
    #[error("normal equations stayed singular up to lambda = {lambda:e}")]
    SingularNormalEquations { lambda: f64 },
    #[error("no training rows: every cycle failed to decompose")]
    EmptyDataset,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: &'static str) -> Self {
        Error::InvalidParameter { name, reason }
    }
}
