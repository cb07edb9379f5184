use super::kernels::dot;
use super::{LinalgError, MatRef, Matrix, UpperTriangular};

/// Orders up to this size use the unblocked right-looking factorization.
pub const CHOLESKY_UNBLOCKED_MAX: usize = 512;
/// Block size of the blocked factorization used above [`CHOLESKY_UNBLOCKED_MAX`].
pub const CHOLESKY_BLOCK: usize = 64;

/// Upper Cholesky factor `U` with `UᵀU = w` and a positive diagonal.
///
/// Only the upper triangle of `w` is read. A pivot that is not strictly
/// positive (including NaN) is reported as `NotPositiveDefinite`.
pub fn cholesky_upper(w: MatRef<'_>) -> Result<UpperTriangular, LinalgError> {
    if w.rows() != w.cols() {
        return Err(LinalgError::NotSquare { shape: w.shape() });
    }
    let n = w.rows();
    let mut u = Matrix::from_fn(n, n, |i, j| if i <= j { w.get(i, j) } else { 0.0 });
    if n <= CHOLESKY_UNBLOCKED_MAX {
        factor_unblocked(&mut u, 0, n)?;
    } else {
        factor_blocked(&mut u)?;
    }
    Ok(UpperTriangular::from_upper_part(u))
}

/// Right-looking factorization of the diagonal block `[lo, hi)` in place.
fn factor_unblocked(u: &mut Matrix, lo: usize, hi: usize) -> Result<(), LinalgError> {
    let mut row = vec![0.0; hi];
    for k in lo..hi {
        let d = u.get(k, k);
        if d.is_nan() || d <= 0.0 {
            return Err(LinalgError::NotPositiveDefinite { pivot_index: k });
        }
        let r = d.sqrt();
        u.set(k, k, r);
        for j in k + 1..hi {
            let v = u.get(k, j) / r;
            u.set(k, j, v);
            row[j] = v;
        }
        for j in k + 1..hi {
            let ukj = row[j];
            let col = &mut u.col_mut(j)[k + 1..=j];
            for (x, &uki) in col.iter_mut().zip(&row[k + 1..=j]) {
                *x -= uki * ukj;
            }
        }
    }
    Ok(())
}

fn factor_blocked(u: &mut Matrix) -> Result<(), LinalgError> {
    let n = u.rows();
    let mut kb = 0;
    while kb < n {
        let ke = (kb + CHOLESKY_BLOCK).min(n);
        factor_unblocked(u, kb, ke)?;
        // U12 := U11⁻ᵀ A12, one column at a time.
        for j in ke..n {
            for i in kb..ke {
                let mut s = u.get(i, j);
                for l in kb..i {
                    s -= u.get(l, i) * u.get(l, j);
                }
                u.set(i, j, s / u.get(i, i));
            }
        }
        // A22 -= U12ᵀ U12 on the upper triangle.
        for j in ke..n {
            let uj: Vec<f64> = u.col(j)[kb..ke].to_vec();
            for i in ke..=j {
                let s = dot(&u.col(i)[kb..ke], &uj);
                let v = u.get(i, j) - s;
                u.set(i, j, v);
            }
        }
        kb = ke;
    }
    Ok(())
}
