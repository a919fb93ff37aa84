use thiserror::Error;

/// Errors produced by the library.
///
/// The CLI maps [`Error::Capacity`] to exit code 2 and every other variant
/// to exit code 1.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid wave: {0}")]
    InvalidWave(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("unsupported spec: {0}")]
    UnsupportedSpec(String),

    #[error("unsupported sign rule: {0}")]
    UnsupportedSign(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("no sign change of the variation slope over the p grid; slopes: {}", format_slopes(.slopes))]
    NoBracket { slopes: Vec<(f64, f64)> },

    #[error("i/o error: {0}")]
    Io(String),
}

fn format_slopes(slopes: &[(f64, f64)]) -> String {
    slopes
        .iter()
        .map(|(p, s)| format!("p={p}:s={s:.6}"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
