//! Controlled-condition test matrices, stability metrics, and the
//! panel condition-number bound check.

mod bounds;
mod generate;
mod metrics;

pub use bounds::{panel_bound_check, PanelBoundReport, BOUND_SLACK};
pub use generate::{generate, planted_spectrum, GeneratedMatrix, Generator};
pub use metrics::{orthogonality_error, residual_error, StabilityReport};

use thiserror::Error;

use crate::dense::LinalgError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TestbedError {
    #[error("generator needs m >= n >= 2, got {m}x{n}")]
    InvalidDimensions { m: usize, n: usize },
    #[error("condition number must be >= 1, got {0}")]
    InvalidCondition(f64),
    #[error("panel width {width} invalid for {cols} columns")]
    InvalidPanelWidth { width: usize, cols: usize },
    #[error("reference matrix has zero norm")]
    ZeroMatrix,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
