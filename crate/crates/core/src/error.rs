use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ring context mismatch")]
    RingMismatch,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("rank mismatch: expected {expected}, found {found}")]
    Rank { expected: usize, found: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("field mismatch or unsupported field operation: {0}")]
    Field(String),

    #[error("presentation matrix has nonzero kernel")]
    KernelNonzero,

    #[error("module is not annihilated: {0}")]
    NotAnnihilated(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid matrix factorization: {0}")]
    InvalidFactorization(String),

    #[error("element must be nonzero: {0}")]
    ZeroElement(String),

    #[error("layer {0} admits no square zero-kernel presentation killed by its element")]
    LayerNotMf(usize),

    #[error("missing mate matrices: {0}")]
    MissingMates(String),

    #[error("bad split point {k} for {n} layers")]
    BadSplit { k: usize, n: usize },

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    #[error("building block not expressible: {0}")]
    NotExpressible(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("unknown catalog entry: {0}")]
    UnknownEntry(String),

    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::Malformed(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
