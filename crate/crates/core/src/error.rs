use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomials live in different rings")]
    RingMismatch,
    #[error("variable `{0}` already occurs in the polynomial")]
    VariableOccurs(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("modulus {0} divides a denominator")]
    DenominatorDivisible(u64),
    #[error("coefficient is not an integer")]
    NotIntegral,
    #[error("matrix is singular")]
    Singular,
    #[error("point lies at infinity (s = 0)")]
    PointAtInfinity,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("n = {n} exceeds the cap {cap}; pass an override to go further")]
    SizeCap { n: usize, cap: usize },
    #[error("lattice basis rows are linearly dependent")]
    DependentRows,
    #[error("mixed degrees in a set that must be homogeneous of one degree")]
    MixedDegrees,
    #[error("rational reconstruction failed: {0}")]
    Reconstruction(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("svd did not converge")]
    SvdNoConvergence,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("file is not normalized: {0}")]
    NotNormalized(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
