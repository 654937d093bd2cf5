use thiserror::Error;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CORRUPT: u8 = 3;
pub const EXIT_PARTIAL: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Codec(#[from] rpcodec::Error),
    #[error("{failed} of {total} files failed; see the manifest")]
    Partial { failed: usize, total: usize },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Invalid parameters from the command line are usage errors.
    pub fn usage_if_param(e: rpcodec::Error) -> Self {
        match e {
            rpcodec::Error::InvalidParameter(m) => CliError::Usage(m),
            other => CliError::Codec(other),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Codec(e) if e.is_data_corruption() => EXIT_CORRUPT,
            CliError::Partial { .. } => EXIT_PARTIAL,
            _ => EXIT_FAILURE,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Codec(e.into())
    }
}
