use thiserror::Error;

/// Errors surfaced by the geometry, mechanism and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("points are affinely dependent, no unique spanning hyperplane")]
    DegenerateSpan,

    #[error("point does not lie on the subspace")]
    PointOffSubspace,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("region has no feasible vertex")]
    EmptyRegion,

    #[error("polytope is not full-dimensional")]
    NotFullDimensional,

    #[error("total volume is zero, nothing to sample")]
    ZeroVolume,

    #[error("covariance estimate is numerically singular")]
    RoundingFailed,

    #[error("volume estimation did not converge: {0}")]
    EstimationFailed(String),

    #[error("selected subspace contains no input points")]
    EmptyRestriction,

    #[error("mechanism stopped with an explicit failure (zero-score class drawn)")]
    MechanismFailure,

    #[error("infeasible dataset parameters: {0}")]
    InfeasibleParams(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
