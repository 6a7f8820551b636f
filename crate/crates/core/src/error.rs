//! Error type shared by every module of the crate.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("covariance matrix is not symmetric (max asymmetry {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("state violates the uncertainty principle: min eigenvalue of Σ + iΩ/2 is {min_eigenvalue:e}")]
    PhysicalityViolation { min_eigenvalue: f64 },

    #[error("covariance determinant {det:e} is not positive")]
    NonPositiveDeterminant { det: f64 },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("mode index {index} out of range for a register of {len} modes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("mode index {0} appears more than once")]
    DuplicateIndex(usize),

    #[error("index list is not a permutation of 0..{0}")]
    NotAPermutation(usize),

    #[error("mode label {0} appears more than once in the register")]
    DuplicateLabel(String),

    #[error("register must contain at least one mode")]
    EmptyRegister,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state register [{state}] does not match transform input register [{transform}]")]
    RegisterMismatch { state: String, transform: String },

    #[error("matrix is not symplectic (max |SΩSᵀ − Ω| = {deviation:e})")]
    NonSymplectic { deviation: f64 },

    #[error("mode {0} is not linearly polarized (H/V)")]
    BadPolarization(String),

    #[error("mode {0} is not circularly polarized (L/R)")]
    NotCircular(String),

    #[error("mode {mode} has no coupling partner {partner} in the register")]
    UnpairedMode { mode: String, partner: String },

    #[error("mode {mode} has more than one candidate partner {partner}")]
    AmbiguousPairing { mode: String, partner: String },

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("iterative criterion stalled after {iterations} iterations without a certificate")]
    ConvergenceStall { iterations: u32 },

    #[error("exhaustive scan supports at most {max} modes, got {found}")]
    TooManyModes { max: usize, found: usize },

    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },

    #[error("file convention sn = {sn} differs from the canonical sn = 1/2 (enable rescaling to convert)")]
    ConventionMismatch { sn: f64 },

    #[error("io error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("step {index} ({name}) failed: {source}")]
    Step {
        index: usize,
        name: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}
