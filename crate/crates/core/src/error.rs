use thiserror::Error;

/// Errors raised by the polytope, kernel, region and Monte Carlo layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("point set spans an affine subspace of dimension {hull_dim} < {dim}")]
    NotFullDimensional { dim: usize, hull_dim: usize },
    #[error("point {point:?} has a negative coordinate")]
    NegativeCoordinate { point: Vec<i64> },
    #[error("dimension {dim} is not supported here")]
    DimensionUnsupported { dim: usize },
    #[error("lattice enumeration of {count} candidate points exceeds the cap of {cap}")]
    Overflow { count: u128, cap: u64 },
    #[error("point lies outside the polytope")]
    OutsidePolytope,
    #[error("exponent {alpha:?} has degree above {p}")]
    OutOfSimplex { alpha: Vec<i64>, p: i64 },
    #[error("point lies on the boundary of the simplex")]
    BoundaryPoint,
    #[error("polytope is not Delzant at vertex {vertex:?}")]
    NonDelzant { vertex: Vec<i64> },
    #[error("no face accepted the normal-bundle solve at s = {s:?}: {diagnostics}")]
    NoFaceAccepted { s: Vec<f64>, diagnostics: String },
    #[error("s = {s:?} is a transition point")]
    TransitionPoint { s: Vec<f64> },
    #[error("root finding failed to certify {uncertified} of {degree} roots")]
    RootFindingFailed { degree: usize, uncertified: usize },
    #[error("resultant evaluation is ill-conditioned")]
    ResultantIllConditioned,
    #[error("the system is degenerate (resultant vanishes identically)")]
    DegenerateSystem,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
