use super::{check_shape, QrError, QrFactorization, ShiftPolicy, Stage};
use crate::comm::Communicator;
use crate::dense::{
    cholesky_upper, frobenius_norm_squared, gram, solve_right_triangular, triangular_product, MatRef,
    Matrix, UpperTriangular,
};
use crate::dist::DistributedMatrix;

/// Global Gram matrix of a block-row distributed `block`: one allreduce.
pub(crate) async fn gram_reduce(comm: &Communicator, block: MatRef<'_>) -> Result<Matrix, QrError> {
    let local = gram(block);
    Ok(comm.allreduce_sum(&local).await?)
}

/// One CholeskyQR pass on a block row.
pub(crate) async fn cqr_block(
    comm: &Communicator,
    block: MatRef<'_>,
) -> Result<(Matrix, UpperTriangular), QrError> {
    let w = gram_reduce(comm, block).await?;
    let r = cholesky_upper(w.view())?;
    let q = solve_right_triangular(block, &r)?;
    Ok((q, r))
}

/// Two CholeskyQR passes with `R = R₂R₁`.
pub(crate) async fn cqr2_block(
    comm: &Communicator,
    block: MatRef<'_>,
) -> Result<(Matrix, UpperTriangular), QrError> {
    let (q1, r1) = cqr_block(comm, block)
        .await
        .map_err(|e| e.at(Stage::FirstPass, None))?;
    let (q, r2) = cqr_block(comm, q1.view())
        .await
        .map_err(|e| e.at(Stage::SecondPass, None))?;
    Ok((q, triangular_product(&r2, &r1)?))
}

async fn scqr_block(
    comm: &Communicator,
    block: MatRef<'_>,
    global_rows: usize,
    policy: &ShiftPolicy,
) -> Result<(Matrix, UpperTriangular), QrError> {
    let norm_sq = comm.allreduce_scalar(frobenius_norm_squared(block)).await?;
    let shift = policy.shift(global_rows, norm_sq);
    let mut w = gram_reduce(comm, block).await?;
    for i in 0..w.rows() {
        w.set(i, i, w.get(i, i) + shift);
    }
    let r = cholesky_upper(w.view()).map_err(|e| QrError::from(e).at(Stage::Shifted, None))?;
    let q = solve_right_triangular(block, &r)?;
    Ok((q, r))
}

/// CholeskyQR: one Gram allreduce, redundant Cholesky, local triangular solve.
pub async fn cqr(a: &DistributedMatrix) -> Result<QrFactorization, QrError> {
    check_shape(a)?;
    let (q, r) = cqr_block(a.comm(), a.local().view())
        .await
        .map_err(|e| e.at(Stage::Cqr, None))?;
    Ok(QrFactorization {
        q: a.with_local(q),
        r,
    })
}

/// CholeskyQR2: CQR applied to the Q factor of CQR.
pub async fn cqr2(a: &DistributedMatrix) -> Result<QrFactorization, QrError> {
    check_shape(a)?;
    let (q, r) = cqr2_block(a.comm(), a.local().view()).await?;
    Ok(QrFactorization {
        q: a.with_local(q),
        r,
    })
}

/// Shifted CholeskyQR. The shift norm is summed with an allreduce so every
/// rank computes the same shift. The resulting Q is a preconditioned factor,
/// not orthogonal to working precision.
pub async fn scqr(a: &DistributedMatrix, policy: &ShiftPolicy) -> Result<QrFactorization, QrError> {
    check_shape(a)?;
    let (q, r) = scqr_block(a.comm(), a.local().view(), a.global_rows(), policy).await?;
    Ok(QrFactorization {
        q: a.with_local(q),
        r,
    })
}

/// Shifted CholeskyQR3: sCQR followed by CQR2 on its Q factor.
pub async fn scqr3(a: &DistributedMatrix, policy: &ShiftPolicy) -> Result<QrFactorization, QrError> {
    check_shape(a)?;
    let comm = a.comm();
    let (q1, r1) = scqr_block(comm, a.local().view(), a.global_rows(), policy).await?;
    let (q, r2) = cqr2_block(comm, q1.view()).await?;
    Ok(QrFactorization {
        q: a.with_local(q),
        r: triangular_product(&r2, &r1)?,
    })
}
