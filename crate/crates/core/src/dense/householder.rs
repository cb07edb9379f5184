use super::kernels::{dot, sub_scaled};
use super::{LinalgError, MatRef, Matrix, UpperTriangular};
use crate::par;

/// Thin Householder QR used as a validation oracle.
///
/// Returns `Q` (m×n, orthonormal columns) and `R` with a non-negative
/// diagonal. Rank deficiency is not detected.
pub fn householder_qr_reference(a: MatRef<'_>) -> Result<(Matrix, UpperTriangular), LinalgError> {
    let (m, n) = a.shape();
    if m < n {
        return Err(LinalgError::WideMatrix { rows: m, cols: n });
    }
    let mut work = a.to_owned();
    let mut taus = vec![0.0; n];

    for j in 0..n {
        let (tau, beta) = {
            let x = &mut work.col_mut(j)[j..];
            make_reflector(x)
        };
        taus[j] = tau;
        if tau != 0.0 {
            let v = reflector(&work, j);
            let (_, mut trailing) = work.view_mut().split_at_col(j + 1);
            par::for_each_column(trailing.as_mut_slice(), m, m - j, |_, col| {
                apply_reflector(&mut col[j..], &v, tau);
            });
        }
        work.set(j, j, beta);
    }

    let mut r = Matrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            r.set(i, j, work.get(i, j));
        }
    }

    let mut q = Matrix::eye(m, n);
    for j in (0..n).rev() {
        if taus[j] == 0.0 {
            continue;
        }
        let v = reflector(&work, j);
        let tau = taus[j];
        par::for_each_column(q.as_mut_slice(), m, m - j, |_, col| {
            apply_reflector(&mut col[j..], &v, tau);
        });
    }

    for i in 0..n {
        if r.get(i, i) < 0.0 {
            for c in i..n {
                r.set(i, c, -r.get(i, c));
            }
            for x in q.col_mut(i) {
                *x = -*x;
            }
        }
    }
    Ok((q, UpperTriangular::from_upper_part(r)))
}

/// Overwrites `x[1..]` with the essential part of `v` (v[0] = 1) and returns
/// `(tau, beta)` so that `(I − tau v vᵀ) x = beta e₁`.
fn make_reflector(x: &mut [f64]) -> (f64, f64) {
    let alpha = x[0];
    let tail_sq = dot(&x[1..], &x[1..]);
    if tail_sq == 0.0 {
        return (0.0, alpha);
    }
    let norm = (alpha * alpha + tail_sq).sqrt();
    let beta = if alpha >= 0.0 { -norm } else { norm };
    let scale = 1.0 / (alpha - beta);
    for v in &mut x[1..] {
        *v *= scale;
    }
    ((beta - alpha) / beta, beta)
}

fn reflector(work: &Matrix, j: usize) -> Vec<f64> {
    let mut v = work.col(j)[j..].to_vec();
    v[0] = 1.0;
    v
}

fn apply_reflector(y: &mut [f64], v: &[f64], tau: f64) {
    let s = tau * dot(v, y);
    sub_scaled(y, s, v);
}
