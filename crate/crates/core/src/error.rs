use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("eigendecomposition did not converge within {0} sweeps")]
    EigenNoConvergence(usize),

    #[error("shifted system is near-singular: |2*lambda + rho| = {0:e}")]
    NearSingularShift(f64),

    #[error("matrix lost positive definiteness in Cholesky factorization")]
    NotPositiveDefinite,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("penalty violates the descent condition: {0}")]
    PenaltyCondition(String),

    #[error("problem size {n} exceeds the cap of {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("image: {0}")]
    Image(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
