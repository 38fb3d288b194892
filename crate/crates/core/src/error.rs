use thiserror::Error;

/// Failures raised by body construction and the exact-geometry operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension {0} outside the supported range 1..=6")]
    UnsupportedDimension(usize),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("non-finite coordinate in input")]
    NonFinite,
    #[error("body is unbounded")]
    Unbounded,
    #[error("degenerate body: {0}")]
    Degenerate(&'static str),
    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("matrix is singular or too ill-conditioned (condition estimate {0:e})")]
    Singular(f64),
    #[error("body is not unconditional")]
    NotUnconditional,
    #[error("body is not centrally symmetric")]
    NotSymmetric,
    #[error("halfspace offsets are not normalized to 1")]
    NotNormalized,
    #[error("internal linear program failure: {0}")]
    Lp(&'static str),
}

/// Failures raised by measure construction and integration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("parameter {index} must be positive and finite, got {value}")]
    NonPositiveParameter { index: usize, value: f64 },
    #[error("box must be symmetric about the origin on axis {0}")]
    AsymmetricBox(usize),
    #[error("measure flags are inconsistent: unconditional requires even")]
    InconsistentFlags,
    #[error("measure has no sampler")]
    MissingSampler,
    #[error("measure has unknown total mass")]
    UnknownMass,
    #[error("unsupported measure for {0}")]
    Unsupported(&'static str),
    #[error("at least {min} samples required, got {got}")]
    TooFewSamples { min: u64, got: u64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
