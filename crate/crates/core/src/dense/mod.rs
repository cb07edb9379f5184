//! Sequential dense kernels shared by every rank, plus the Householder oracle
//! and an extreme-singular-value estimator used for validation.

mod cholesky;
mod householder;
mod kernels;
mod matrix;
mod spectrum;

pub use cholesky::{cholesky_upper, CHOLESKY_BLOCK, CHOLESKY_UNBLOCKED_MAX};
pub use householder::householder_qr_reference;
pub use kernels::{
    frobenius_norm_squared, gram, matmul, solve_right_triangular, subtract_product,
    subtract_product_in_place, triangular_product,
};
pub use matrix::{MatMut, MatRef, Matrix, UpperTriangular};
pub use spectrum::{extreme_singular_values, ExtremeSingularValues};

use thiserror::Error;

/// Unit roundoff of IEEE-754 binary64, 2^-53.
pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("{op}: dimension mismatch {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is not square: {shape:?}")]
    NotSquare { shape: (usize, usize) },
    #[error("entry ({row}, {col}) below the diagonal is nonzero")]
    NotUpperTriangular { row: usize, col: usize },
    #[error("matrix is not positive definite: pivot {pivot_index} is not positive")]
    NotPositiveDefinite { pivot_index: usize },
    #[error("triangular factor is singular: zero diagonal at {index}")]
    SingularTriangular { index: usize },
    #[error("iteration did not converge in {iters} steps")]
    NoConvergence { iters: usize },
    #[error("expected {expected} entries, got {actual}")]
    BufferLength { expected: usize, actual: usize },
    #[error("need rows >= cols, got {rows}x{cols}")]
    WideMatrix { rows: usize, cols: usize },
}
