use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),

    #[error("density matrix trace deviates from 1 by {0:.3e}")]
    TraceDeviation(f64),

    #[error("density matrix has negative eigenvalue {0:.3e}")]
    NotPositive(f64),

    #[error("eigendecomposition of unitary failed")]
    EigFailure,

    #[error("time grid too coarse: dt * max||H|| = {0:.3e} >= 0.5")]
    GridAccuracy(f64),

    #[error("objects defined on different time grids")]
    GridMismatch,

    #[error("integration accuracy lost ({0}); reduce dt")]
    IntegrationAccuracy(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pulse evaluated at t = {0} outside [0, tau]")]
    PulseOutOfRange(f64),

    #[error("optimization failed: {0}")]
    OptimizationFailed(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
