use thiserror::Error;

use crate::scalar::Backend;

/// Errors and negative verdicts produced by the library.
///
/// Several variants (`NotUnital`, `Distinct`, `NotComposition`, ...) are
/// mathematical answers rather than failures; callers that need to tell
/// the two apart can use [`Error::is_verdict`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero scalar where a nonzero one is required")]
    ZeroScalar,
    #[error("value out of the supported range: {0}")]
    OutOfRange(String),
    #[error("cannot parse scalar {0:?}")]
    ParseScalar(String),
    #[error("Cayley-Dickson parameter {index} is zero")]
    ZeroParameter { index: usize },
    #[error("unsupported number of Cayley-Dickson parameters: {0} (expected 0..=3)")]
    ParameterCount(usize),
    #[error("algebra construction check failed: {0}")]
    Construction(String),
    #[error("operands belong to different algebras")]
    AlgebraMismatch,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("element is not invertible (norm {norm})")]
    NotInvertible { norm: f64 },
    #[error("linear map is singular")]
    Singular,
    #[error("map is not a similitude (max deviation {deviation:e})")]
    NotSimilitude { deviation: f64 },
    #[error("operation requires a Euclidean algebra")]
    NotEuclidean,
    #[error("map is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("isotope is not unital: {0}")]
    NotUnital(String),
    #[error("identity element of the isotope has zero norm")]
    IsotropicIdentity,
    #[error("similitude is improper but the algebra has dimension >= 4")]
    ImproperSimilitude,
    #[error("triality triple does not match (residual {residual:e})")]
    TrialityMismatch { residual: f64 },
    #[error("isotopes are distinct: {0}")]
    Distinct(String),
    #[error("double sign is undefined for the split algebra k x k")]
    SplitBinaryAlgebra,
    #[error("operation requires dimension >= 2")]
    Dim1,
    #[error("isotope is not a composition algebra: {0} is not a similitude")]
    NotComposition(&'static str),
    #[error("triality solver failed after {restarts} restarts (best residual {best_residual:e})")]
    TrialitySolverFailed { restarts: usize, best_residual: f64 },
    #[error("triality triples are not related by a nuclear element: {0}")]
    NotRelated(String),
    #[error("map is not an inner automorphism: {0}")]
    NotInner(String),
    #[error("degenerate solution space of dimension {nullity}")]
    Degenerate { nullity: usize },
    #[error("map is not special orthogonal (deviation {deviation:e})")]
    NotSpecialOrthogonal { deviation: f64 },
    #[error("operation requires dimension {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("pairs are not simultaneously conjugate")]
    NotConjugate,
    #[error("{0} needs the approximate backend")]
    ExactUnsupported(&'static str),
    #[error("backend mismatch: expected {expected}, got {got}")]
    BackendMismatch { expected: Backend, got: Backend },
    #[error("invalid input: {0}")]
    Parse(String),
    #[error("self-check failed: {0}")]
    SelfCheck(String),
}

impl Error {
    /// True for variants that report a negative mathematical verdict
    /// rather than an operational failure.
    pub fn is_verdict(&self) -> bool {
        matches!(
            self,
            Error::NotUnital(_)
                | Error::NotSimilitude { .. }
                | Error::Distinct(_)
                | Error::NotComposition(_)
                | Error::NotRelated(_)
                | Error::NotInner(_)
                | Error::NotConjugate
                | Error::NotInvertible { .. }
                | Error::ImproperSimilitude
                | Error::IsotropicIdentity
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
