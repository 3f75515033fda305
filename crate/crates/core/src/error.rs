use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("invalid input: {0}")]
    Validation(String),

    /// The matrix is not positive semidefinite within tolerance.
    #[error("not a state: minimum eigenvalue {min_eigenvalue:e}")]
    NotAState { min_eigenvalue: f64 },

    #[error("normal form does not exist (nu0 = {nu0:e})")]
    NormalFormMissing { nu0: f64 },

    #[error("filter annihilates state (p_succ = {p_succ:e})")]
    FilterAnnihilates { p_succ: f64 },

    /// Integration or an eigen-solve produced something unphysical.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The error with all [`Error::Context`] layers peeled off.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit code used by the command line front end:
    /// 1 validation, 2 numerical failure, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Validation(_) | Error::NotAState { .. } | Error::Parse(_) => 1,
            Error::NormalFormMissing { .. }
            | Error::FilterAnnihilates { .. }
            | Error::Numerical(_) => 2,
            Error::Io { .. } => 3,
            Error::Context { .. } => unreachable!(),
        }
    }
}
