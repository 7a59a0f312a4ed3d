use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate phase: zero modulus at sample {index}")]
    DegeneratePhase { index: usize },

    #[error("trimming {n_edge} samples from each end of a {len}-sample signal leaves nothing")]
    EmptyResult { len: usize, n_edge: usize },

    #[error("center frequency {center} Hz is not below the Nyquist frequency {nyquist} Hz")]
    Aliasing { center: f64, nyquist: f64 },

    #[error("signal of {len} samples is too short; at least {required} needed")]
    SignalTooShort { len: usize, required: usize },

    #[error("pair (m = {m} Hz, n = {n} Hz) is out of band")]
    OutOfBand { m: f64, n: f64 },

    #[error("estimate unreliable: only {segments} Welch segment(s)")]
    UnreliableEstimate { segments: usize },

    #[error("degenerate phase-amplitude distribution: total amplitude is zero")]
    DegenerateDistribution,

    #[error("unknown method `{0}`")]
    InvalidMethod(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for the numeric conditions that a comodulogram maps to a zero cell.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::DegeneratePhase { .. } | Error::DegenerateDistribution | Error::OutOfBand { .. })
    }
}
