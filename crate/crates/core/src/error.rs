use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("register too large: dimension {0} exceeds 8")]
    RegisterTooLarge(usize),
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("qubit {index} out of range for a {n}-qubit register")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("qubit indices must be distinct (got {0} twice)")]
    DuplicateQubit(usize),
    #[error("matrix not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("state not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("norm drift {0:e} after applying operator")]
    NormDrift(f64),
    #[error("density matrix trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("non-finite value in input")]
    NonFinite,
    #[error("phi out of supported range [0, pi/2]: {0}")]
    PhiOutOfRange(f64),
    #[error("arcsin domain: argument {0} outside [-1, 1]")]
    ArcsinDomain(f64),
    #[error("invalid coefficient triple: {0}")]
    InvalidCoefficients(String),
    #[error("invalid input state: {0}")]
    InvalidInput(String),
    #[error("cross-check failed: {0}")]
    CrossCheck(String),
}
