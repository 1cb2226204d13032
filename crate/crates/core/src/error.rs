use crate::var::Var;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("variable `{0}` is not mapped by the substitution")]
    UnmappedVar(Var),
    #[error("lifting `{lifting}` expects {expected} argument(s), got {got}")]
    Arity {
        lifting: String,
        expected: usize,
        got: usize,
    },
    #[error("lifting `{lifting}` is not part of the signature of functor `{functor}`")]
    UnknownLifting { lifting: String, functor: String },
    #[error("functor `{functor}` is not supported by {operation}")]
    UnsupportedFunctor { functor: String, operation: String },
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("formula is not positive: {0}")]
    NotPositive(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unguarded formula: {0}")]
    Unguarded(String),
    #[error("ill-formed element: {0}")]
    IllFormed(String),
    #[error("no dividing cover at {0}")]
    NoCover(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn resource(msg: impl Into<String>) -> Error {
    Error::Resource(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}
