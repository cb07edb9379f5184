use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::TestbedError;
use crate::dense::{householder_qr_reference, matmul, Matrix};

/// Stream ids for the per-purpose generators derived from one seed.
const STREAM_LEFT: u64 = 1;
const STREAM_RIGHT: u64 = 2;

/// A test matrix with its planted spectrum.
#[derive(Debug, Clone)]
pub struct GeneratedMatrix {
    pub matrix: Matrix,
    pub seed: u64,
    pub target_condition: f64,
    /// Planted singular values, descending, from 1 down to 1/κ.
    pub singular_values: Vec<f64>,
}

/// Geometric spectrum `σ_i = κ^(−i/(n−1))`, i = 0..n, pinned to exactly
/// 1 and 1/κ at the ends.
pub fn planted_spectrum(n: usize, kappa: f64) -> Vec<f64> {
    let mut s: Vec<f64> = (0..n)
        .map(|i| kappa.powf(-(i as f64) / (n - 1) as f64))
        .collect();
    s[0] = 1.0;
    s[n - 1] = 1.0 / kappa;
    s
}

/// Holds the random orthonormal factors for one (m, n, seed) so that a
/// whole condition-number sweep shares them.
#[derive(Debug, Clone)]
pub struct Generator {
    seed: u64,
    left: Matrix,
    right_t: Matrix,
}

impl Generator {
    /// Draws `U` (m×n) and `V` (n×n) as Householder Q factors of standard
    /// Gaussian matrices. Each factor uses its own ChaCha8 stream of `seed`
    /// and is filled column-major.
    pub fn new(m: usize, n: usize, seed: u64) -> Result<Self, TestbedError> {
        if n < 2 || m < n {
            return Err(TestbedError::InvalidDimensions { m, n });
        }
        let left = orthonormal_factor(m, n, seed, STREAM_LEFT)?;
        let right = orthonormal_factor(n, n, seed, STREAM_RIGHT)?;
        Ok(Self {
            seed,
            left,
            right_t: right.transpose(),
        })
    }

    pub fn rows(&self) -> usize {
        self.left.rows()
    }

    pub fn cols(&self) -> usize {
        self.left.cols()
    }

    /// `A = U · diag(σ) · Vᵀ` with the planted spectrum for `kappa`.
    pub fn build(&self, kappa: f64) -> Result<GeneratedMatrix, TestbedError> {
        if !kappa.is_finite() || kappa < 1.0 {
            return Err(TestbedError::InvalidCondition(kappa));
        }
        let sigma = planted_spectrum(self.cols(), kappa);
        let mut scaled = self.left.clone();
        scaled.scale_columns(&sigma);
        let matrix = matmul(scaled.view(), self.right_t.view(), false)?;
        Ok(GeneratedMatrix {
            matrix,
            seed: self.seed,
            target_condition: kappa,
            singular_values: sigma,
        })
    }
}

fn orthonormal_factor(rows: usize, cols: usize, seed: u64, stream: u64) -> Result<Matrix, TestbedError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let gaussian = Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal));
    let (q, _) = householder_qr_reference(gaussian.view())?;
    Ok(q)
}

/// An m×n matrix with condition number `kappa` and largest singular value 1,
/// deterministic in `seed`.
pub fn generate(m: usize, n: usize, kappa: f64, seed: u64) -> Result<GeneratedMatrix, TestbedError> {
    if !kappa.is_finite() || kappa < 1.0 {
        return Err(TestbedError::InvalidCondition(kappa));
    }
    Generator::new(m, n, seed)?.build(kappa)
}
