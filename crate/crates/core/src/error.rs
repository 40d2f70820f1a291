use alloc::string::String;

/// Errors from geometric primitives and cycle construction.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point is off the manifold (constraint residual {residual:e})")]
    OffManifold { residual: f64 },
    #[error("points are {distance} apart, above the unique-minimizer limit {limit}")]
    TooFar { distance: f64, limit: f64 },
    #[error("tangent vector is not based at the segment start (miss {miss:e})")]
    BaseMismatch { miss: f64 },
    #[error("geodesic shooting did not converge (best endpoint miss {miss:e})")]
    ShootingFailed { miss: f64 },
    #[error("geodesic integration produced a non-finite state")]
    IntegrationFailed,
    #[error("invalid cycle: {0}")]
    InvalidCycle(String),
    #[error("chain {chain} has length {length}, above N*inj/4 = {limit}; use N >= {suggested_n}")]
    ChainTooLong {
        chain: usize,
        length: f64,
        limit: f64,
        suggested_n: usize,
    },
    #[error("flow step stretched a segment to {length}, above inj/2 = {limit}")]
    StepTooLong { length: f64, limit: f64 },
    #[error("net vertex {vertex} has odd degree {degree}")]
    OddDegree { vertex: usize, degree: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
