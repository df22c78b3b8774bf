use thiserror::Error;

/// Everything that can go wrong while loading, building, evaluating or
/// expanding a model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("sort mismatch: {0}")]
    SortMismatch(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("uninhabited sort `{0}`")]
    UninhabitedSort(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("inconsistent: {0}")]
    Inconsistent(String),
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("unknown index `{0}`")]
    UnknownIndex(String),
    #[error("unknown world or time `{0}`")]
    UnknownPoint(String),
    #[error("invalid declaration: {0}")]
    Declaration(String),
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
    #[error("{0}")]
    Command(String),
    #[error("unsupported session format version {found} (this build reads up to {supported})")]
    Version { found: u32, supported: u32 },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
