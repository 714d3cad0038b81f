use crate::linalg::C64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is singular to working precision (pivot {pivot} has relative magnitude {ratio:.3e})")]
    SingularMatrix { pivot: usize, ratio: f64 },

    #[error("K(s) is singular at argument {index} (s = {point})")]
    SingularAtPoint { index: usize, point: C64 },

    #[error("basis is empty: every column fell below the rank tolerance")]
    EmptyBasis,

    #[error("basis has numerical rank {rank}, expected {expected}")]
    RankDeficientBasis { rank: usize, expected: usize },

    #[error("derivative of order {requested} requested, evaluator declares at most {declared}")]
    UnsupportedDerivative { requested: usize, declared: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid interpolation spec: {0}")]
    InvalidSpec(String),

    #[error("cannot realify basis: {0}")]
    RealifyImpossible(String),

    #[error("transfer function vanishes at grid point {0}")]
    DivisionByZero(String),

    #[error("linearly implicit step {step} failed: singular step matrix")]
    StepFailure { step: usize },

    #[error("delay {tau} is not a positive integer multiple of dt = {dt}")]
    NonIntegerDelayRatio { tau: f64, dt: f64 },

    #[error("trajectory grids differ: {0}")]
    GridMismatch(String),

    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("unknown name: {0}")]
    UnknownName(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures caused by the numerics (singular pencils, rank loss)
    /// rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularMatrix { .. }
                | Error::SingularAtPoint { .. }
                | Error::EmptyBasis
                | Error::RankDeficientBasis { .. }
                | Error::DivisionByZero(_)
                | Error::StepFailure { .. }
        )
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SingularMatrix { .. } => "SingularMatrix",
            Error::SingularAtPoint { .. } => "SingularMatrix",
            Error::EmptyBasis => "EmptyBasis",
            Error::RankDeficientBasis { .. } => "RankDeficientBasis",
            Error::UnsupportedDerivative { .. } => "UnsupportedDerivative",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::InvalidSystem(_) => "InvalidSystem",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::RealifyImpossible(_) => "RealifyImpossible",
            Error::DivisionByZero(_) => "DivisionByZero",
            Error::StepFailure { .. } => "StepFailure",
            Error::NonIntegerDelayRatio { .. } => "NonIntegerDelayRatio",
            Error::GridMismatch(_) => "GridMismatch",
            Error::InvalidSize(_) => "InvalidSize",
            Error::UnknownName(_) => "UnknownName",
            Error::Unsupported(_) => "Unsupported",
            Error::Json(_) => "Json",
            Error::Io(_) => "Io",
        }
    }
}
