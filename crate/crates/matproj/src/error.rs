//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{which} matrix is not symmetric: max relative asymmetry {found:.3e} exceeds {tol:.0e}")]
    NotSymmetric {
        which: &'static str,
        found: f64,
        tol: f64,
    },

    #[error("{which} matrix is not positive definite")]
    NotPositiveDefinite { which: &'static str },

    #[error("empty support: the projection is the point mass at zero and has no density")]
    EmptySupport,

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("support indices contain duplicates (index {index})")]
    DuplicateIndex { index: usize },

    #[error("groups must be pairwise disjoint: index {index} appears twice")]
    OverlappingGroups { index: usize },

    #[error("group must be nonempty")]
    EmptyGroup,

    #[error("group costs must be positive")]
    NonPositiveCost,

    #[error("unknown group id {id} (structure has {count} groups)")]
    UnknownGroup { id: usize, count: usize },

    #[error("element {element} outside the constraint ground set of size {ground}")]
    OutsideGround { element: usize, ground: usize },

    #[error("element {element} has no view assignment")]
    UnassignedElement { element: usize },

    #[error("views must be disjoint: element {element} assigned twice")]
    OverlappingViews { element: usize },

    #[error("candidate block overlaps the current support at index {index}")]
    OverlappingBlock { index: usize },

    #[error("gain state does not match the provided support")]
    StateMismatch,

    #[error("objective evaluation failed on {set:?}: {source}")]
    ObjectiveEval {
        set: Vec<usize>,
        #[source]
        source: Box<Error>,
    },

    #[error("non-finite objective value on {set:?}")]
    NonFiniteObjective { set: Vec<usize> },

    #[error("enumeration cap of {cap} feasible sets exceeded")]
    EnumerationCapExceeded { cap: u64 },

    #[error("constraint kind not supported by this solver: {0}")]
    UnsupportedConstraint(&'static str),

    #[error("infeasible initial selection: cost {cost} exceeds budget {budget}")]
    InfeasibleInit { cost: usize, budget: usize },

    #[error("noise variance must be positive, got {0}")]
    NonPositiveNoiseVariance(f64),

    #[error("free energy became non-finite at iteration {iter}")]
    FreeEnergyDiverged { iter: usize, trace: Vec<f64> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
