use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {0:?} out of range 1..4")]
    IndexOutOfRange([usize; 4]),
    #[error("conflicting entry for C{0}")]
    ConflictingEntry(String),
    #[error("first Bianchi identity violated (C1234 - C1324 + C1423 = {0})")]
    BianchiViolation(String),
    #[error("matrix is not special orthogonal")]
    NotSpecialOrthogonal,
    #[error("point is not on the unit sphere")]
    NotOnSphere,
    #[error("radial eigenvalue {0:e} exceeds tolerance")]
    RadialEigenvalueNonzero(f64),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("zero Killing vector")]
    ZeroVector,
    #[error("zero skew matrix")]
    ZeroMatrix,
    #[error("symmetry signature ({rotations} rotations, {translations} translations) matches no web")]
    UnknownSignature { rotations: usize, translations: usize },
    #[error("no canonical match: {reason} (best residual {best_residual:e})")]
    NoCanonicalMatch { reason: String, best_residual: f64, degenerate: bool },
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),
    #[error("ellipsoidal constraint violated by {0:e}")]
    ConstraintViolated(f64),
    #[error("no CKT found: {0}")]
    NotFound(String),
    #[error("coordinates not provided for the {0} web")]
    UnsupportedWeb(String),
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("chart singularity: sampling retries exhausted")]
    ChartSingularity,
}

pub type Result<T> = std::result::Result<T, Error>;
