use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] east_core::Error),

    #[error("emitted file {path} failed validation: {msg}")]
    Schema { path: String, msg: String },

    #[error("plot {path}: {msg}")]
    Plot { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit code: 2 config, 3 resource cap, 4 numerical contract, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_resource_cap() => 3,
            CliError::Core(e) if e.is_numerical() => 4,
            CliError::Core(east_core::Error::Domain(_) | east_core::Error::Precondition(_)) => 2,
            CliError::Schema { .. } => 4,
            _ => 1,
        }
    }
}
