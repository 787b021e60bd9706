use crate::grid::Field;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),
    #[error("{field:?} location ({i}, {j}) is not an owned degree of freedom")]
    IndexOutOfRange { field: Field, i: i64, j: i64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("one-dimensional block size must be at least 2, got {0}")]
    BlockSize(usize),
    #[error("matrix is not symmetric positive definite: pivot {index} is {value:e}")]
    NotPositiveDefinite { index: usize, value: f64 },
    #[error("right-hand side is not compatible with the null space (block sum {residual:e})")]
    IncompatibleRhs { residual: f64 },
    #[error("singular matrix at pivot {0}")]
    Singular(usize),
    #[error(
        "eigenvalue iteration did not converge for eigenvalue {index} after {iterations} sweeps"
    )]
    EigenNoConvergence { index: usize, iterations: usize },
    #[error("dense size {size} exceeds the cap of {cap}")]
    SizeCap { size: usize, cap: usize },
    #[error("exact-Schur preconditioner requested without a Schur factorization")]
    MissingSchur,
    #[error(
        "momentum block is singular for steady flow with periodic boundaries in both directions"
    )]
    SingularMomentum,
}
