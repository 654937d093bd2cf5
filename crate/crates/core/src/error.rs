use crate::bitstream::BitError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Bitstream(#[from] BitError),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed stream: {0}")]
    MalformedStream(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("coding trees do not cover the frame: {0}")]
    CoverageGap(String),

    #[error("block {0} lies outside the frame")]
    OutOfBounds(String),

    #[error("missing reconstruction input: {0}")]
    MissingInput(&'static str),

    #[error("perturbation series missed the mean/std tolerance after {attempts} attempts (sigma {sigma})")]
    ToleranceNotMet { sigma: f64, attempts: u32 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("{0} has no counterpart")]
    MissingCounterpart(String),

    #[error("nothing to evaluate: {0}")]
    EmptyEvaluation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by corrupt or truncated coded data.
    pub fn is_data_corruption(&self) -> bool {
        matches!(self, Error::Bitstream(_) | Error::MalformedStream(_))
    }
}
