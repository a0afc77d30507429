use thiserror::Error;

/// Errors reported by the geometric layers.
///
/// Parse errors of the model language live in [`crate::dsl`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
    #[error("unknown coordinate `{0}` on chart {1}")]
    UnknownCoordinate(String, String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("arity mismatch: form of degree {degree} evaluated on {got} vectors")]
    ArityMismatch { degree: usize, got: usize },
    #[error("degree error: {0}")]
    DegreeError(String),
    #[error("not projectable: component {component} depends on fiber coordinate {coordinate}")]
    NotProjectable { component: String, coordinate: String },
    #[error("not real-linear: fiber component {0} is not homogeneous of degree 1 in (w1, w2)")]
    NotRealLinear(String),
    #[error("not complex-linear: {0}")]
    NotComplexLinear(String),
    #[error("not Hermitian: {0}")]
    NotHermitian(String),
    #[error("not a Hermitian connection: {0}")]
    NotHermitianConnection(String),
    #[error("not a section: {0}")]
    NotSection(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
