use super::kernels::dot;
use super::{cholesky_upper, gram, LinalgError, MatRef, Matrix, UpperTriangular};

/// Estimated largest and smallest singular values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremeSingularValues {
    pub sigma_max: f64,
    pub sigma_min: f64,
}

impl ExtremeSingularValues {
    pub fn condition(&self) -> f64 {
        self.sigma_max / self.sigma_min
    }
}

/// Estimates the extreme singular values of a full-column-rank `a`.
///
/// `sigma_max` comes from power iteration on `aᵀa`, `sigma_min` from inverse
/// iteration through the Cholesky factor of `aᵀa`. Both stop once the
/// Rayleigh quotient changes by at most `tol` relative between sweeps. These
/// are estimates: accuracy depends on the spectral gap at each end.
pub fn extreme_singular_values(
    a: MatRef<'_>,
    max_iters: usize,
    tol: f64,
) -> Result<ExtremeSingularValues, LinalgError> {
    let (m, n) = a.shape();
    if m < n {
        return Err(LinalgError::WideMatrix { rows: m, cols: n });
    }
    if n == 0 {
        return Ok(ExtremeSingularValues {
            sigma_max: 0.0,
            sigma_min: 0.0,
        });
    }
    let w = gram(a);
    let lambda_max = rayleigh_iteration(n, max_iters, tol, |x| sym_matvec(&w, x))?;
    let u = cholesky_upper(w.view())?;
    let mu = rayleigh_iteration(n, max_iters, tol, |x| cholesky_solve(&u, x))?;
    Ok(ExtremeSingularValues {
        sigma_max: lambda_max.sqrt(),
        sigma_min: (1.0 / mu).sqrt(),
    })
}

fn rayleigh_iteration(
    n: usize,
    max_iters: usize,
    tol: f64,
    apply: impl Fn(&[f64]) -> Vec<f64>,
) -> Result<f64, LinalgError> {
    // Deterministic start with no special alignment to coordinate axes.
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 + 1.0).sqrt() / n as f64).collect();
    normalize(&mut x);
    let mut previous = f64::NAN;
    for _ in 0..max_iters {
        let y = apply(&x);
        let lambda = dot(&x, &y);
        if (lambda - previous).abs() <= tol * lambda.abs() {
            return Ok(lambda);
        }
        previous = lambda;
        x = y;
        normalize(&mut x);
    }
    Err(LinalgError::NoConvergence { iters: max_iters })
}

fn normalize(x: &mut [f64]) {
    let norm = dot(x, x).sqrt();
    if norm > 0.0 {
        for v in x {
            *v /= norm;
        }
    }
}

fn sym_matvec(w: &Matrix, x: &[f64]) -> Vec<f64> {
    (0..w.cols()).map(|j| dot(w.col(j), x)).collect()
}

/// Solves `UᵀU y = x`.
fn cholesky_solve(u: &UpperTriangular, x: &[f64]) -> Vec<f64> {
    let n = u.order();
    let mut z = x.to_vec();
    for i in 0..n {
        let mut s = z[i];
        for l in 0..i {
            s -= u.get(l, i) * z[l];
        }
        z[i] = s / u.get(i, i);
    }
    for i in (0..n).rev() {
        let mut s = z[i];
        for l in i + 1..n {
            s -= u.get(i, l) * z[l];
        }
        z[i] = s / u.get(i, i);
    }
    z
}
