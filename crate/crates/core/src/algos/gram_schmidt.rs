use super::cholqr::{cqr2_block, cqr_block, gram_reduce};
use super::{check_shape, QrError, QrFactorization, Stage};
use crate::comm::Communicator;
use crate::dense::{
    cholesky_upper, matmul, solve_right_triangular, subtract_product_in_place, triangular_product,
    Matrix, UpperTriangular,
};
use crate::dist::{DistributedMatrix, PanelSpec};

/// One blocked Gram-Schmidt CholeskyQR pass. `work` is overwritten with Q.
///
/// Per panel: Gram allreduce, Cholesky, local solve, then (except for the
/// last panel) one allreduce of the projections onto the trailing panels
/// followed by the local trailing update. 2k − 1 allreduces for k panels.
async fn cqrgs_in_place(
    comm: &Communicator,
    work: &mut Matrix,
    spec: &PanelSpec,
) -> Result<UpperTriangular, QrError> {
    let n = work.cols();
    let mut r = Matrix::zeros(n, n);
    for j in 0..spec.count() {
        let cols = spec.columns(j)?;
        let w = gram_reduce(comm, work.columns(cols.clone())).await?;
        let u = cholesky_upper(w.view()).map_err(|e| QrError::from(e).at(Stage::Cqr, Some(j)))?;
        let q = solve_right_triangular(work.columns(cols.clone()), &u)?;
        work.columns_mut(cols.clone()).copy_from(q.view());
        r.set_block(cols.start, cols.start, u.view());

        let trailing = spec.trailing_columns(j);
        if trailing.is_empty() {
            continue;
        }
        let partial = matmul(work.columns(cols.clone()), work.columns(trailing.clone()), true)?;
        let y = comm.allreduce_sum(&partial).await?;
        let (left, mut right) = work.view_mut().split_at_col(trailing.start);
        subtract_product_in_place(&mut right, left.as_ref().columns(cols.clone()), y.view())?;
        r.set_block(cols.start, trailing.start, y.view());
    }
    Ok(UpperTriangular::from_upper_part(r))
}

/// CholeskyQR with blocked Gram-Schmidt (single pass).
pub async fn cqrgs(a: &DistributedMatrix, spec: &PanelSpec) -> Result<QrFactorization, QrError> {
    check_shape(a)?;
    let mut work = a.local().clone();
    let r = cqrgs_in_place(a.comm(), &mut work, spec).await?;
    Ok(QrFactorization {
        q: a.with_local(work),
        r,
    })
}

/// CholeskyQR2 with Gram-Schmidt: two CQRGS passes with the same panels.
pub async fn cqr2gs(a: &DistributedMatrix, spec: &PanelSpec) -> Result<QrFactorization, QrError> {
    cqr2gs_with(a, spec, spec).await
}

/// CQR2GS with separate panel layouts for the two passes.
pub async fn cqr2gs_with(
    a: &DistributedMatrix,
    first: &PanelSpec,
    second: &PanelSpec,
) -> Result<QrFactorization, QrError> {
    check_shape(a)?;
    let comm = a.comm();
    let mut work = a.local().clone();
    let r1 = cqrgs_in_place(comm, &mut work, first)
        .await
        .map_err(|e| e.at(Stage::FirstPass, None))?;
    let r2 = cqrgs_in_place(comm, &mut work, second)
        .await
        .map_err(|e| e.at(Stage::SecondPass, None))?;
    Ok(QrFactorization {
        q: a.with_local(work),
        r: triangular_product(&r2, &r1)?,
    })
}

/// Modified CholeskyQR2 with Gram-Schmidt.
///
/// The first panel gets a full CQR2. Every later panel j is brought up to
/// date against panel j − 1 (lazy trailing update), factored by CQR,
/// reorthogonalized against all finished panels, and factored again. The
/// local block is overwritten with Q panel by panel.
///
/// R bookkeeping: with Ã_j the updated panel, Ã_j = V₁U₁,
/// V₁ − Q_{<j}C = Q_jU₂, hence R_{jj} = U₂U₁ and R_{<j,j} gains C·U₁ on top
/// of the projections stored by the trailing updates.
pub async fn mcqr2gs(a: &DistributedMatrix, spec: &PanelSpec) -> Result<QrFactorization, QrError> {
    check_shape(a)?;
    let comm = a.comm();
    let n = a.global_cols();
    let mut work = a.local().clone();
    let mut r = Matrix::zeros(n, n);

    let first = spec.columns(0)?;
    let (q0, r00) = cqr2_block(comm, work.columns(first.clone()))
        .await
        .map_err(|e| e.at(Stage::Panel1Cqr2, Some(0)))?;
    work.columns_mut(first.clone()).copy_from(q0.view());
    r.set_block(0, 0, r00.view());

    for j in 1..spec.count() {
        let prev = spec.columns(j - 1)?;
        let cur = spec.columns(j)?;
        let rest = cur.start..n;

        let partial = matmul(work.columns(prev.clone()), work.columns(rest.clone()), true)?;
        let y = comm.allreduce_sum(&partial).await?;
        {
            let (left, mut right) = work.view_mut().split_at_col(rest.start);
            subtract_product_in_place(&mut right, left.as_ref().columns(prev.clone()), y.view())?;
        }
        r.set_block(prev.start, rest.start, y.view());

        let (mut v, u1) = cqr_block(comm, work.columns(cur.clone()))
            .await
            .map_err(|e| e.at(Stage::FirstCqr, Some(j)))?;

        let finished = work.columns(0..cur.start);
        let partial = matmul(finished, v.view(), true)?;
        let c = comm.allreduce_sum(&partial).await?;
        subtract_product_in_place(&mut v.view_mut(), finished, c.view())?;

        let (q, u2) = cqr_block(comm, v.view())
            .await
            .map_err(|e| e.at(Stage::SecondCqr, Some(j)))?;
        work.columns_mut(cur.clone()).copy_from(q.view());

        let rjj = triangular_product(&u2, &u1)?;
        r.set_block(cur.start, cur.start, rjj.view());
        let correction = matmul(c.view(), u1.view(), false)?;
        r.add_block(0, cur.start, correction.view());
    }

    Ok(QrFactorization {
        q: a.with_local(work),
        r: UpperTriangular::from_upper_part(r),
    })
}
