use thiserror::Error;

/// Errors across the crate. `exit_code` groups them the way the CLI reports
/// them: 1 for mathematical refusals, 2 for bad input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape: {0}")]
    Shape(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error("input: unknown letter '{0}'")]
    UnknownLetter(char),
    #[error("input: {0}")]
    Input(String),
    #[error("refusal projectivity: {0}")]
    Projectivity(String),
    #[error("refusal determinism: {0}")]
    Determinism(String),
    #[error("refusal linearity: {0}")]
    Linearity(String),
    #[error("refusal unsupported: {0}")]
    Unsupported(String),
    #[error("budget: {0}")]
    Budget(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Projectivity(_)
            | Error::Determinism(_)
            | Error::Linearity(_)
            | Error::Unsupported(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
