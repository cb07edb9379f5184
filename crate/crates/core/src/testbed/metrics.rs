use std::time::Duration;

use super::TestbedError;
use crate::algos::Breakdown;
use crate::dense::{frobenius_norm_squared, gram, MatRef, Matrix, UpperTriangular};
use crate::harness::RunOutcome;
use crate::par;

/// `‖qᵀq − I‖_F / √n`.
pub fn orthogonality_error(q: MatRef<'_>) -> f64 {
    let n = q.cols();
    if n == 0 {
        return 0.0;
    }
    let mut w = gram(q);
    for i in 0..n {
        w.set(i, i, w.get(i, i) - 1.0);
    }
    frobenius_norm_squared(w.view()).sqrt() / (n as f64).sqrt()
}

/// `‖q·r − a‖_F / ‖a‖_F`.
pub fn residual_error(a: MatRef<'_>, q: MatRef<'_>, r: &UpperTriangular) -> Result<f64, TestbedError> {
    let a_norm = frobenius_norm_squared(a).sqrt();
    if a_norm == 0.0 {
        return Err(TestbedError::ZeroMatrix);
    }
    let n = r.order();
    assert_eq!(q.cols(), n, "q and r do not conform");
    assert_eq!(a.shape(), (q.rows(), n), "a and q·r do not conform");
    let m = a.rows();
    // q·r − a, skipping the zero triangle of r.
    let mut diff = Matrix::zeros(m, n);
    par::for_each_column(diff.as_mut_slice(), m, m * n / 2 + 1, |j, col| {
        for (d, &x) in col.iter_mut().zip(a.col(j)) {
            *d = -x;
        }
        for l in 0..=j {
            let rlj = r.get(l, j);
            for (d, &x) in col.iter_mut().zip(q.col(l)) {
                *d += x * rlj;
            }
        }
    });
    Ok(frobenius_norm_squared(diff.view()).sqrt() / a_norm)
}

/// Metrics for one factorization run. A breakdown leaves both errors at +∞.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub orthogonality: f64,
    pub residual: f64,
    pub breakdown: Option<Breakdown>,
    pub allreduce_calls: u64,
    pub elapsed: Duration,
}

impl StabilityReport {
    /// Evaluates the gathered factors of `outcome` against the original `a`.
    pub fn evaluate(a: &Matrix, outcome: &RunOutcome) -> Result<Self, TestbedError> {
        let (orthogonality, residual, breakdown) = match &outcome.factors {
            Ok(f) => (
                orthogonality_error(f.q.view()),
                residual_error(a.view(), f.q.view(), &f.r)?,
                None,
            ),
            Err(e) => (f64::INFINITY, f64::INFINITY, e.breakdown().copied()),
        };
        Ok(Self {
            orthogonality,
            residual,
            breakdown,
            allreduce_calls: outcome.stats.allreduce_calls,
            elapsed: outcome.elapsed,
        })
    }

    /// Both metrics at or below `tol`.
    pub fn within(&self, tol: f64) -> bool {
        self.orthogonality <= tol && self.residual <= tol
    }
}
