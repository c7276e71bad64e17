use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Core(#[from] otoc_core::Error),
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl LabError {
    /// 2 for bad input or unreadable files, 3 for size caps; 1 is left to
    /// failed assertions.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Usage(_) | LabError::Parse(_) => 2,
            LabError::Core(otoc_core::Error::Resource(_)) => 3,
            LabError::Core(otoc_core::Error::Structural(_)) | LabError::Core(otoc_core::Error::Domain(_)) => 2,
            LabError::Io { .. } => 2,
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        LabError::Io { path: path.display().to_string(), source }
    }
}

pub type LabResult<T> = Result<T, LabError>;
