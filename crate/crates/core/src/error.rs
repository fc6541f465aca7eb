use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed kernel: {0}")]
    MalformedKernel(String),

    #[error("covariance is not positive semidefinite: eigenvalue {lambda:.6e} at frequency k={k}")]
    NotPsd { k: usize, lambda: f64 },

    #[error("singular covariance: eigenvalue {lambda:.3e} at frequency k={k} is below {tolerance:.1e}")]
    SingularCovariance { k: usize, lambda: f64, tolerance: f64 },

    #[error("dense materialization of n={n} exceeds the limit of {limit}")]
    SizeLimit { n: usize, limit: usize },

    #[error("frequency k={0} has no sine partner (constant or alternating mode)")]
    UnpairedMode(usize),

    #[error("no paired eigenmode available for n={0}")]
    NoPairedMode(usize),

    #[error(
        "concentration condition violated: argmin lambda at k={argmin_lambda}, argmin k^2*lambda at k={argmin_k2lambda}"
    )]
    ConditionViolated {
        argmin_lambda: usize,
        argmin_k2lambda: usize,
    },

    #[error("resolution {r} outside [{min}, {max}]")]
    ResolutionOutOfRange { r: usize, min: usize, max: usize },

    #[error("axis mismatch: {0}")]
    AxisMismatch(String),

    #[error("Fisher information must be positive, got {0}")]
    NonpositiveInformation(f64),

    #[error("phase decoding needs a single-mode population, found {0} modes")]
    MultiModePopulation(usize),

    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
