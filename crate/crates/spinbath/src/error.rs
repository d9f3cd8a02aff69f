use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid physical parameters or run options.
    #[error("config: {0}")]
    Config(String),
    /// A sweep configuration document failed to parse.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    /// A numerical evaluation produced a non-finite value.
    #[error("computation failed at t = {t}: {message}")]
    Computation { t: f64, message: String },
    /// A density matrix did not have the expected structure.
    #[error("state structure: {0}")]
    Structure(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for configuration problems,
    /// 3 for computational failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse { .. } | Error::Io(_) => 2,
            Error::Computation { .. } | Error::Structure(_) => 3,
        }
    }
}
