use thiserror::Error;

use crate::mesh::Side;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{msg}, line {line}")]
    Parse { line: usize, msg: String },

    #[error("mesh has no boundary edges on side {0:?}")]
    EmptySide(Side),

    #[error("unsupported quadrature order {0}")]
    UnsupportedOrder(usize),

    #[error("incompatible function space: {0}")]
    IncompatibleSpace(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is numerically singular (pivot column {0})")]
    SingularMatrix(usize),

    #[error("solver contract violated: {0}")]
    Contract(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("reduced block library has no block {0}")]
    MissingBlock(String),

    #[error("unknown reference domain `{0}`")]
    UnknownReference(String),

    #[error("sample {index} failed: {source}")]
    Sample {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
