use std::path::PathBuf;

/// Errors produced anywhere in the solver stack.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    Usage(String),

    #[error("matrix is singular: zero pivot in column {column}")]
    SingularMatrix { column: usize },

    #[error("singular element block in element {element} (ordinate {ordinate})")]
    SingularElement { element: usize, ordinate: usize },

    #[error("row {row} has a zero diagonal entry")]
    ZeroDiagonal { row: usize },

    #[error("void (sigma_t = 0) in DSA scope at element {element}")]
    VoidInScope { element: usize },

    #[error("solver produced a non-finite residual at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid config at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
