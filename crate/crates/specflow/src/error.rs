use thiserror::Error;

/// Failure classes with their process exit codes.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical certificate failed: {0}")]
    Certificate(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 4,
            RunError::Certificate(_) => 3,
            RunError::Io(_) => 1,
        }
    }
}

impl From<specflow_core::Error> for RunError {
    fn from(e: specflow_core::Error) -> Self {
        if e.is_certificate() {
            RunError::Certificate(e.to_string())
        } else {
            // Everything else traces back to the configured inputs: bad
            // shapes, support beyond the cutoff, a zero mode at an endpoint.
            RunError::Config(e.to_string())
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

impl From<csv::Error> for RunError {
    fn from(e: csv::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for RunError {
    fn from(e: serde_json::Error) -> Self {
        RunError::Io(e.to_string())
    }
}
