use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("shape mismatch at {path}: {message}")]
    Shape { path: String, message: String },
    #[error("unknown code `{0}`")]
    UnresolvedCode(String),
    #[error("embedding cycle through code `{0}`")]
    EmbeddingCycle(String),
    #[error("invalid signature: {0}")]
    Signature(String),
    #[error("terms are decoded against different codes")]
    CodeMismatch,
    #[error("{0}")]
    Usage(String),
}
