use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("B/C harmonics of order |m| = 1 are singular at the pole (l = {l}, m = {m})")]
    PoleSingularity { l: usize, m: i32 },

    #[error("quadrature rule exact to degree {available} cannot resolve bandlimit {required}")]
    ResolutionMismatch { required: usize, available: usize },

    #[error("region is empty (area {0:e} sr)")]
    EmptyRegion(f64),

    #[error("symmetric eigensolver failed: {0}")]
    EigenFailure(String),

    #[error("eigenvalue {0:e} lies outside [-1e-10, 1 + 1e-10]")]
    RangeViolation(f64),

    #[error("inconsistent bandlimit: expected {expected}, found {found}")]
    Bandlimit { expected: usize, found: usize },

    #[error("coefficient vector has a nonzero radial block")]
    NonzeroRadial,

    #[error("basis is incomplete: {have} of {need} columns")]
    IncompleteBasis { have: usize, need: usize },

    #[error("index {index} out of range for {len} items")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("field has no energy {0}")]
    ZeroEnergy(&'static str),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a numerical contract (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::EigenFailure(_) | Error::RangeViolation(_) | Error::ResolutionMismatch { .. }
        )
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
