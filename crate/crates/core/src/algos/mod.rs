//! CholeskyQR-family factorizations, written as per-rank async bodies.
//!
//! Every algorithm reads a [`DistributedMatrix`], communicates only through
//! its communicator's `allreduce_sum`, and returns a distributed `Q` with the
//! input's row partition plus an `R` computed redundantly on every rank.

mod cholqr;
mod gram_schmidt;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use cholqr::{cqr, cqr2, scqr, scqr3};
pub use gram_schmidt::{cqr2gs, cqr2gs_with, cqrgs, mcqr2gs};

use crate::comm::CommError;
use crate::dense::{LinalgError, UpperTriangular, UNIT_ROUNDOFF};
use crate::dist::{DistributedMatrix, PanelError, PanelSpec};

/// Distributed `Q` (same row partition as the input) and replicated `R`.
#[derive(Debug, Clone)]
pub struct QrFactorization {
    pub q: DistributedMatrix,
    pub r: UpperTriangular,
}

/// Where a Cholesky factorization failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// The single pass of CQR.
    Cqr,
    /// First CQR (or CQRGS) pass of a two-pass algorithm.
    FirstPass,
    /// Second CQR (or CQRGS) pass of a two-pass algorithm.
    SecondPass,
    /// The shifted pass of sCQR / sCQR3.
    Shifted,
    /// CQR2 of the first panel in mCQR2GS.
    Panel1Cqr2,
    /// mCQR2GS: CQR of a panel right after the trailing update.
    FirstCqr,
    /// mCQR2GS: CQR of a panel after reorthogonalization.
    SecondCqr,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Cqr => "cqr",
            Stage::FirstPass => "first-pass",
            Stage::SecondPass => "second-pass",
            Stage::Shifted => "shifted",
            Stage::Panel1Cqr2 => "panel1-cqr2",
            Stage::FirstCqr => "first-cqr",
            Stage::SecondCqr => "second-cqr",
        })
    }
}

/// Cholesky breakdown of a numerically non-positive-definite Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Breakdown {
    /// 0-based panel index for the panelled algorithms.
    pub panel: Option<usize>,
    pub stage: Stage,
    pub pivot_index: usize,
}

impl fmt::Display for Breakdown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cholesky breakdown at {}", self.stage)?;
        if let Some(p) = self.panel {
            write!(f, " panel {p}")?;
        }
        write!(f, " pivot {}", self.pivot_index)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QrError {
    #[error("{0}")]
    Breakdown(Breakdown),
    #[error(transparent)]
    Comm(#[from] CommError),
    #[error(transparent)]
    Linalg(LinalgError),
    #[error(transparent)]
    Panel(#[from] PanelError),
    #[error("need m >= n >= 1, got {rows}x{cols}")]
    InvalidShape { rows: usize, cols: usize },
    #[error("{algorithm} does not take a panel count")]
    PanelsNotApplicable { algorithm: Algorithm },
    #[error("R differs between rank 0 and rank {rank}")]
    ReplicaDivergence { rank: usize },
}

impl From<LinalgError> for QrError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::NotPositiveDefinite { pivot_index } => QrError::Breakdown(Breakdown {
                panel: None,
                stage: Stage::Cqr,
                pivot_index,
            }),
            other => QrError::Linalg(other),
        }
    }
}

impl QrError {
    /// Attaches the stage and panel to a breakdown; other errors pass through.
    pub(crate) fn at(self, stage: Stage, panel: Option<usize>) -> Self {
        match self {
            QrError::Breakdown(b) => QrError::Breakdown(Breakdown {
                panel: panel.or(b.panel),
                stage,
                pivot_index: b.pivot_index,
            }),
            other => other,
        }
    }

    pub fn breakdown(&self) -> Option<&Breakdown> {
        match self {
            QrError::Breakdown(b) => Some(b),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShiftMode {
    /// `s = √m · u · ‖A‖²_F`: the Frobenius norm overestimates the 2-norm,
    /// so the shift errs on the large side.
    #[default]
    ConservativeFrobenius,
}

/// Shift used by sCQR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftPolicy {
    pub unit_roundoff: f64,
    pub mode: ShiftMode,
}

impl Default for ShiftPolicy {
    fn default() -> Self {
        Self {
            unit_roundoff: UNIT_ROUNDOFF,
            mode: ShiftMode::ConservativeFrobenius,
        }
    }
}

impl ShiftPolicy {
    pub fn with_unit_roundoff(unit_roundoff: f64) -> Self {
        Self {
            unit_roundoff,
            ..Self::default()
        }
    }

    /// Shift for a matrix with `global_rows` rows and squared Frobenius norm `frobenius_sq`.
    pub fn shift(&self, global_rows: usize, frobenius_sq: f64) -> f64 {
        match self.mode {
            ShiftMode::ConservativeFrobenius => {
                (global_rows as f64).sqrt() * self.unit_roundoff * frobenius_sq
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Cqr,
    Cqr2,
    Scqr,
    Scqr3,
    Cqrgs,
    Cqr2gs,
    Mcqr2gs,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Cqr,
        Algorithm::Cqr2,
        Algorithm::Scqr,
        Algorithm::Scqr3,
        Algorithm::Cqrgs,
        Algorithm::Cqr2gs,
        Algorithm::Mcqr2gs,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Cqr => "cqr",
            Algorithm::Cqr2 => "cqr2",
            Algorithm::Scqr => "scqr",
            Algorithm::Scqr3 => "scqr3",
            Algorithm::Cqrgs => "cqrgs",
            Algorithm::Cqr2gs => "cqr2gs",
            Algorithm::Mcqr2gs => "mcqr2gs",
        }
    }

    /// Whether the algorithm processes the matrix in column panels.
    pub fn uses_panels(&self) -> bool {
        matches!(self, Algorithm::Cqrgs | Algorithm::Cqr2gs | Algorithm::Mcqr2gs)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
                format!("unknown algorithm `{s}` (expected one of {})", names.join(", "))
            })
    }
}

/// Algorithm parameters beyond the input matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FactorOptions {
    /// Requested panel count for the panelled algorithms; `None` means one panel.
    pub panels: Option<usize>,
    pub shift: ShiftPolicy,
}

impl FactorOptions {
    pub fn panels(panels: usize) -> Self {
        Self {
            panels: Some(panels),
            ..Self::default()
        }
    }
}

/// Runs `algorithm` on this rank's block of `a`.
pub async fn factor(
    a: &DistributedMatrix,
    algorithm: Algorithm,
    options: &FactorOptions,
) -> Result<QrFactorization, QrError> {
    if !algorithm.uses_panels() && options.panels.is_some_and(|k| k != 1) {
        return Err(QrError::PanelsNotApplicable { algorithm });
    }
    let spec = || PanelSpec::from_panels(a.global_cols(), options.panels.unwrap_or(1));
    match algorithm {
        Algorithm::Cqr => cqr(a).await,
        Algorithm::Cqr2 => cqr2(a).await,
        Algorithm::Scqr => scqr(a, &options.shift).await,
        Algorithm::Scqr3 => scqr3(a, &options.shift).await,
        Algorithm::Cqrgs => cqrgs(a, &spec()?).await,
        Algorithm::Cqr2gs => cqr2gs(a, &spec()?).await,
        Algorithm::Mcqr2gs => mcqr2gs(a, &spec()?).await,
    }
}

pub(crate) fn check_shape(a: &DistributedMatrix) -> Result<(), QrError> {
    let (rows, cols) = (a.global_rows(), a.global_cols());
    if cols == 0 || rows < cols {
        return Err(QrError::InvalidShape { rows, cols });
    }
    Ok(())
}
