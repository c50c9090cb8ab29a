use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid label {label:?}: {reason}")]
    InvalidLabel { label: String, reason: String },

    #[error("duplicate label {0:?} in vocabulary")]
    DuplicateLabel(String),

    #[error("transition mask has a dead end: {0}")]
    DeadEnd(String),

    #[error("no legal path through the lattice")]
    NoLegalPath,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("tag index {index} out of range for {num_tags} tags")]
    IndexOutOfRange { index: usize, num_tags: usize },

    #[error("invalid score: {0}")]
    InvalidScore(String),

    #[error("line {line}: {message}")]
    Conll { line: usize, message: String },

    #[error("invalid spans: {0}")]
    InvalidSpans(String),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("corpus contains no entities")]
    NoEntities,

    #[error("record {record}: {message}")]
    Record { record: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
