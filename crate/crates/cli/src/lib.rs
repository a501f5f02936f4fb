//! Experiment runner behind the `qegreedy` binary.

pub mod config;
pub mod oracle;
pub mod report;
pub mod runner;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] qegreedy::Error),
    #[error("{0}")]
    Runtime(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for configuration problems, 4 for exceeded size caps, 3 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(qegreedy::Error::CapExceeded { .. }) => 4,
            _ => 3,
        }
    }
}
