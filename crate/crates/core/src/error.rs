use crate::linalg::IntVector;
use crate::quiver::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid quiver:\n{0}")]
    Invalid(ValidationReport),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-integral result in {0}")]
    Integrality(String),
    #[error("{beta} cannot serve as a reflection axis")]
    NonExceptionalAxis { beta: IntVector },
    #[error("initial sequence violates exceptional ordering: {0}")]
    Ordering(String),
    #[error("braid move at position {position} has no sign making the result nonnegative")]
    AmbiguousSign { position: usize },
    #[error("braid move at position {position} has no unique solution")]
    Unresolvable { position: usize },
    #[error("root enumeration incomplete and {beta} not found within caps")]
    Inconclusive { beta: IntVector },
    #[error("modulation with z != 1 at vertex {vertex} cannot be realized over a finite field")]
    UnsupportedModulation { vertex: usize },
    #[error("field of order {p}^{degree} exceeds table limit")]
    FieldTooLarge { p: u32, degree: usize },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("no exceptional module of dimension {beta} found; retry with a larger q")]
    SearchExhausted { beta: IntVector },
    #[error("subroot test {sub} in {beta} inconclusive after random sampling")]
    SubrootInconclusive { sub: IntVector, beta: IntVector },
    #[error("expected {expected} perpendicular simples for {beta}, found {found}")]
    CountMismatch { beta: IntVector, expected: usize, found: usize },
    #[error("Hom spaces have dimensions {left} and {right}; determinant undefined")]
    NotSquare { left: usize, right: usize },
    #[error("{beta} has sincere support; deleted-vertex check needs beta_j = 0")]
    Precondition { beta: IntVector },
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("{alpha} lies in no cone of the fan")]
    NotInFan { alpha: IntVector },
    #[error("endomorphism class of {beta} is ambiguous: {candidates:?}")]
    AmbiguousEndoClass { beta: IntVector, candidates: Vec<i64> },
    #[error("no vertex has f = {f} (root {beta})")]
    NoEndoClass { beta: IntVector, f: i64 },
    #[error("picture requires rank 3, quiver has rank {0}")]
    RankUnsupported(usize),
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
