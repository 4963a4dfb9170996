use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("site out of range: {0}")]
    SiteOutOfRange(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
    #[error("linear solve did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("grid too coarse: plaquette Berry phase {phase:.3} reaches the admissibility bound")]
    GridTooCoarse { phase: f64 },
    #[error("partition invalid: {0}")]
    InvalidPartition(String),
    #[error("band {band} is not isolated: {detail}")]
    BandNotIsolated { band: usize, detail: String },
    #[error("group velocity vanishes for an edge mode at ky={ky:.4}")]
    ZeroVelocity { ky: f64 },
    #[error("no root found: {0}")]
    NoRoot(String),
    #[error("unstable cavity: |(A+D)/2| = {0:.4} > 1")]
    UnstableCavity(f64),
    #[error("loss rates stayed non-positive after {0} resamples")]
    NonPositiveLoss(usize),
    #[error("no interior minimum of the gap width on the supplied grid")]
    NoTransition,
}

pub type Result<T> = std::result::Result<T, Error>;
