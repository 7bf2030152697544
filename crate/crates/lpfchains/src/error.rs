use lpfchains_core::chains::ChainViolation;
use thiserror::Error;

/// Everything the command line can fail with, mapped onto exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] lpfchains_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed input: {0}")]
    Input(String),
    #[error("invalid chain: {0}")]
    InvalidChain(ChainViolation),
}

impl CliError {
    /// 1 invalid chain, 2 usage, 3 resource or cap, 4 IO or malformed input.
    pub fn exit_code(&self) -> i32 {
        use lpfchains_core::Error as E;
        match self {
            CliError::InvalidChain(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Core(E::Resource { .. } | E::CapExceeded { .. } | E::Overflow) => 3,
            CliError::Core(_) => 2,
            CliError::Io(_) | CliError::Input(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Core(e) => e.kind(),
            CliError::Io(_) => "io",
            CliError::Input(_) => "input",
            CliError::InvalidChain(_) => "invalid_chain",
        }
    }

    /// One-line JSON object for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => CliError::Io(io),
                _ => unreachable!(),
            }
        } else {
            CliError::Input(e.to_string())
        }
    }
}
