use super::{LinalgError, MatMut, MatRef, Matrix, UpperTriangular};
use crate::par;

const LANES: usize = 8;

/// Dot product with a fixed eight-lane accumulation order.
#[inline]
pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = [0.0f64; LANES];
    let xs = x.chunks_exact(LANES);
    let ys = y.chunks_exact(LANES);
    let (xt, yt) = (xs.remainder(), ys.remainder());
    for (a, b) in xs.zip(ys) {
        for l in 0..LANES {
            acc[l] += a[l] * b[l];
        }
    }
    let mut tail = 0.0;
    for (a, b) in xt.iter().zip(yt) {
        tail += a * b;
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// `y -= alpha * x`
#[inline]
pub(crate) fn sub_scaled(y: &mut [f64], alpha: f64, x: &[f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi -= alpha * xi;
    }
}

/// Gram matrix `aᵀa`. The upper triangle is computed and mirrored, so the
/// result is bitwise symmetric.
pub fn gram(a: MatRef<'_>) -> Matrix {
    let n = a.cols();
    let m = a.rows();
    let upper: Vec<Vec<f64>> = par::map_indices(n, m * n / 2 + 1, |j| {
        let cj = a.col(j);
        (0..=j).map(|i| dot(a.col(i), cj)).collect()
    });
    let mut w = Matrix::zeros(n, n);
    for (j, column) in upper.iter().enumerate() {
        for (i, &v) in column.iter().enumerate() {
            w.set(i, j, v);
            w.set(j, i, v);
        }
    }
    w
}

/// `aᵀb` when `transpose_a`, otherwise `ab`.
pub fn matmul(a: MatRef<'_>, b: MatRef<'_>, transpose_a: bool) -> Result<Matrix, LinalgError> {
    let (out_rows, inner) = if transpose_a {
        (a.cols(), a.rows())
    } else {
        (a.rows(), a.cols())
    };
    if inner != b.rows() {
        return Err(LinalgError::DimensionMismatch {
            op: "matmul",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let mut out = Matrix::zeros(out_rows, b.cols());
    let work = out_rows * inner + 1;
    if transpose_a {
        par::for_each_column(out.as_mut_slice(), out_rows, work, |j, col| {
            let bj = b.col(j);
            for (i, x) in col.iter_mut().enumerate() {
                *x = dot(a.col(i), bj);
            }
        });
    } else {
        par::for_each_column(out.as_mut_slice(), out_rows, work, |j, col| {
            for l in 0..inner {
                sub_scaled(col, -b.get(l, j), a.col(l));
            }
        });
    }
    Ok(out)
}

/// In-place `c -= q·y`.
pub fn subtract_product_in_place(
    c: &mut MatMut<'_>,
    q: MatRef<'_>,
    y: MatRef<'_>,
) -> Result<(), LinalgError> {
    if q.cols() != y.rows() || c.shape() != (q.rows(), y.cols()) {
        return Err(LinalgError::DimensionMismatch {
            op: "subtract_product",
            left: q.shape(),
            right: y.shape(),
        });
    }
    let rows = c.rows();
    let inner = q.cols();
    par::for_each_column(c.as_mut_slice(), rows, rows * inner + 1, |j, col| {
        for l in 0..inner {
            sub_scaled(col, y.get(l, j), q.col(l));
        }
    });
    Ok(())
}

/// Returns `c − q·y`.
pub fn subtract_product(c: MatRef<'_>, q: MatRef<'_>, y: MatRef<'_>) -> Result<Matrix, LinalgError> {
    let mut out = c.to_owned();
    subtract_product_in_place(&mut out.view_mut(), q, y)?;
    Ok(out)
}

/// Solves `X·u = a` for `X` by forward substitution over the columns of `u`.
///
/// Rows are independent, so the work is split into row chunks; every row is
/// processed by the same column sweep regardless of chunking.
pub fn solve_right_triangular(a: MatRef<'_>, u: &UpperTriangular) -> Result<Matrix, LinalgError> {
    let n = u.order();
    if a.cols() != n {
        return Err(LinalgError::DimensionMismatch {
            op: "solve_right_triangular",
            left: a.shape(),
            right: (n, n),
        });
    }
    if let Some(index) = (0..n).find(|&i| u.get(i, i) == 0.0) {
        return Err(LinalgError::SingularTriangular { index });
    }
    let m = a.rows();
    const CHUNK: usize = 256;
    let chunks = m.div_ceil(CHUNK);
    let solved: Vec<Matrix> = par::map_indices(chunks, CHUNK * n * n / 2 + 1, |c| {
        let r0 = c * CHUNK;
        let r1 = (r0 + CHUNK).min(m);
        let mut x = Matrix::from_fn(r1 - r0, n, |i, j| a.get(r0 + i, j));
        solve_in_place(&mut x, u);
        x
    });
    if solved.len() == 1 {
        return Ok(solved.into_iter().next().expect("one chunk"));
    }
    let mut out = Matrix::zeros(m, n);
    for (c, x) in solved.iter().enumerate() {
        out.set_block(c * CHUNK, 0, x.view());
    }
    Ok(out)
}

fn solve_in_place(x: &mut Matrix, u: &UpperTriangular) {
    let n = u.order();
    let rows = x.rows();
    let data = x.as_mut_slice();
    for j in 0..n {
        let (done, rest) = data.split_at_mut(j * rows);
        let xj = &mut rest[..rows];
        for i in 0..j {
            let uij = u.get(i, j);
            if uij != 0.0 {
                sub_scaled(xj, uij, &done[i * rows..(i + 1) * rows]);
            }
        }
        let d = u.get(j, j);
        for v in xj.iter_mut() {
            *v /= d;
        }
    }
}

/// Product of two upper-triangular factors; the zero region is never touched.
pub fn triangular_product(
    r2: &UpperTriangular,
    r1: &UpperTriangular,
) -> Result<UpperTriangular, LinalgError> {
    let n = r2.order();
    if r1.order() != n {
        return Err(LinalgError::DimensionMismatch {
            op: "triangular_product",
            left: (n, n),
            right: (r1.order(), r1.order()),
        });
    }
    let mut out = Matrix::zeros(n, n);
    par::for_each_column(out.as_mut_slice(), n, n * n / 2 + 1, |j, col| {
        for (i, x) in col.iter_mut().enumerate().take(j + 1) {
            let mut s = 0.0;
            for l in i..=j {
                s += r2.get(i, l) * r1.get(l, j);
            }
            *x = s;
        }
    });
    Ok(UpperTriangular::from_upper_part(out))
}

/// Sum of squares of all entries.
pub fn frobenius_norm_squared(a: MatRef<'_>) -> f64 {
    let d = a.as_slice();
    dot(d, d)
}
