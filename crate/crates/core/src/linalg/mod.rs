//! Sparse matrices and Krylov solvers.

mod cg;
mod csr;

use thiserror::Error;

pub use cg::{conjugate_gradient, conjugate_gradient_monitored, CgOptions, CgSolution, Preconditioner};
pub use csr::{csr_from_triplets, CsrMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("entry ({row}, {col}) out of range for dimension {dim}")]
    IndexOutOfRange { row: usize, col: usize, dim: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("conjugate gradients did not converge (best residual {:e})", .best.residual)]
    MaxIterationsExceeded { best: Box<CgSolution> },
    #[error("non-positive curvature {curvature:e} at iteration {iteration}")]
    IndefiniteMatrix { iteration: usize, curvature: f64 },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
}
