use thiserror::Error;

use crate::energy::EricksenViolation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed parameter: {0}")]
    MalformedParameter(String),
    #[error("Ericksen inequalities violated: {}", list_violations(.0))]
    Ericksen(Vec<EricksenViolation>),
    #[error("consistency check failed: {0}")]
    Consistency(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("checkpoint checksum mismatch (stored {stored:#018x}, computed {computed:#018x})")]
    Checksum { stored: u64, computed: u64 },
    #[error("checkpoint format error: {0}")]
    Format(String),
    #[error("volume projection failed: {0}")]
    Projection(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn list_violations(v: &[EricksenViolation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
