use perpetuity_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config invalid: {0}")]
    ConfigInvalid(String),
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub fn config(msg: impl Into<String>) -> Self {
        LabError::ConfigInvalid(msg.into())
    }

    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            LabError::ConfigInvalid(_) => "config_invalid",
            LabError::Core(e) => e.code(),
            LabError::Io(_) => "io",
            LabError::Json(_) => "json",
        }
    }

    /// Process exit code: 2 for configuration errors, 3 for everything else
    /// (1 is reserved for failed checks).
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::ConfigInvalid(_) => 2,
            _ => 3,
        }
    }
}
