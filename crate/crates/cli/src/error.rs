use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("stability check failed: {0}")]
    GasFailure(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// 0 success, 1 config or i/o, 2 certification, 3 search exhausted,
    /// 4 stability check.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Certification(_) => 2,
            CliError::SearchExhausted(_) => 3,
            CliError::GasFailure(_) => 4,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
