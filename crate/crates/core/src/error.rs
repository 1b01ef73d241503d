use thiserror::Error;

/// Errors raised by the simulation, analysis and protocol layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("total Hilbert dimension {0} exceeds the cap of {cap}", cap = crate::qmath::MAX_DIM)]
    DimensionTooLarge(usize),

    #[error("entry data has length {found}, expected {expected}")]
    BadShape { expected: usize, found: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("state is not pure")]
    NotPure,

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("bad gate parameter: {0}")]
    BadParameter(String),

    #[error("gate `{name}` is not defined at dimension {dim}")]
    BadDimension { name: String, dim: usize },

    #[error("probe set is empty")]
    EmptyProbeSet,

    #[error("list is empty")]
    EmptyList,

    #[error("value {value} out of range: {what}")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("probe `{0}` has no physical sampling interpretation")]
    NonPhysicalProbe(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
