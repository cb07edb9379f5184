//! Analytic flop / word / message counts, plus the exact collective counts
//! produced by this crate's implementations.
//!
//! Model formulas take integer inputs and are evaluated in `f64`. Words and
//! messages assume tree collectives (`log₂P` steps per allreduce); flops are
//! raw operation counts, not times.

use std::fmt;
use std::str::FromStr;

use crate::algos::Algorithm;
use crate::dist::PanelSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostModel {
    Cqr,
    Cqr2,
    Scqr3,
    Cqr2gs,
    Scalapack,
}

impl CostModel {
    pub const ALL: [CostModel; 5] = [
        CostModel::Cqr,
        CostModel::Cqr2,
        CostModel::Scqr3,
        CostModel::Cqr2gs,
        CostModel::Scalapack,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CostModel::Cqr => "cqr",
            CostModel::Cqr2 => "cqr2",
            CostModel::Scqr3 => "scqr3",
            CostModel::Cqr2gs => "cqr2gs",
            CostModel::Scalapack => "scalapack",
        }
    }

    pub fn evaluate(&self, m: usize, n: usize, p: usize, b: Option<usize>) -> CostEstimate {
        match self {
            CostModel::Cqr => cqr_cost(m, n, p),
            CostModel::Cqr2 => cqr2_cost(m, n, p),
            CostModel::Scqr3 => scqr3_cost(m, n, p),
            CostModel::Cqr2gs => cqr2gs_cost(m, n, p, b.unwrap_or(n)),
            CostModel::Scalapack => scalapack_qr_cost(m, n, p),
        }
    }
}

impl fmt::Display for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CostModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CostModel::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown cost model `{s}` (expected cqr, cqr2, scqr3, cqr2gs or scalapack)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostEstimate {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub b: Option<usize>,
    pub flops: f64,
    /// Words moved, summed over the reduction trees.
    pub words: f64,
    /// Point-to-point messages on the critical path.
    pub messages: f64,
    /// Collective calls as counted by the model.
    pub calls: f64,
}

fn log2p(p: usize) -> f64 {
    (p as f64).log2()
}

fn estimate(m: usize, n: usize, p: usize, b: Option<usize>, flops: f64, words: f64, calls: f64) -> CostEstimate {
    CostEstimate {
        m,
        n,
        p,
        b,
        flops,
        words,
        messages: calls * log2p(p),
        calls,
    }
}

/// Parallel CholeskyQR: `n³/3 + 2mn²/P + n²log₂P` flops, `n²log₂P` words.
pub fn cqr_cost(m: usize, n: usize, p: usize) -> CostEstimate {
    let (mf, nf, pf) = (m as f64, n as f64, p as f64);
    let lg = log2p(p);
    estimate(m, n, p, None, nf.powi(3) / 3.0 + 2.0 * mf * nf * nf / pf + nf * nf * lg, nf * nf * lg, 1.0)
}

/// CholeskyQR2: `n³ + 4mn²/P + 2n²log₂P` flops, `2n²log₂P` words, two allreduces.
pub fn cqr2_cost(m: usize, n: usize, p: usize) -> CostEstimate {
    let (mf, nf, pf) = (m as f64, n as f64, p as f64);
    let lg = log2p(p);
    estimate(
        m,
        n,
        p,
        None,
        nf.powi(3) + 4.0 * mf * nf * nf / pf + 2.0 * nf * nf * lg,
        2.0 * nf * nf * lg,
        2.0,
    )
}

/// Shifted CholeskyQR3: `5n³/3 + 6mn²/P + 3n²log₂P + 2mn/P` flops (the last
/// term is the shift's Frobenius norm), `3n²log₂P` words. Four collectives:
/// three Gram reductions and the scalar norm, whose single word the word
/// count ignores.
pub fn scqr3_cost(m: usize, n: usize, p: usize) -> CostEstimate {
    let (mf, nf, pf) = (m as f64, n as f64, p as f64);
    let lg = log2p(p);
    estimate(
        m,
        n,
        p,
        None,
        5.0 / 3.0 * nf.powi(3) + 6.0 * mf * nf * nf / pf + 3.0 * nf * nf * lg + 2.0 * mf * nf / pf,
        3.0 * nf * nf * lg,
        4.0,
    )
}

/// CholeskyQR2 with Gram-Schmidt at panel width `b`:
/// `2b²n/3 + n³/3 + 4mn²/P + n(n+b)log₂P` flops, `n(n+b)log₂P` words and
/// `2n²/b²` calls (tile-level count).
pub fn cqr2gs_cost(m: usize, n: usize, p: usize, b: usize) -> CostEstimate {
    let (mf, nf, pf, bf) = (m as f64, n as f64, p as f64, b as f64);
    let lg = log2p(p);
    estimate(
        m,
        n,
        p,
        Some(b),
        2.0 * bf * bf * nf / 3.0 + nf.powi(3) / 3.0 + 4.0 * mf * nf * nf / pf + nf * (nf + bf) * lg,
        nf * (nf + bf) * lg,
        2.0 * nf * nf / (bf * bf),
    )
}

/// Householder QR reference (`PxGEQRF`): `2mn²/P − 2n³/(3P)` flops,
/// `(n²/2)log₂P` words, `2n·log₂P` messages.
pub fn scalapack_qr_cost(m: usize, n: usize, p: usize) -> CostEstimate {
    let (mf, nf, pf) = (m as f64, n as f64, p as f64);
    let lg = log2p(p);
    CostEstimate {
        m,
        n,
        p,
        b: None,
        flops: 2.0 * mf * nf * nf / pf - 2.0 / 3.0 * nf.powi(3) / pf,
        words: nf * nf / 2.0 * lg,
        messages: 2.0 * nf * lg,
        calls: 2.0 * nf,
    }
}

/// Exact number of `allreduce_sum` entries per rank.
///
/// `panels` is the effective panel count (`PanelSpec::count`) and is ignored
/// by the unpanelled algorithms. The last panel of a CQRGS pass issues no
/// projection reduce, hence `2k − 1` per pass.
pub fn collective_calls(algorithm: Algorithm, panels: usize) -> u64 {
    let k = panels as u64;
    match algorithm {
        Algorithm::Cqr => 1,
        Algorithm::Cqr2 => 2,
        Algorithm::Scqr => 2,
        Algorithm::Scqr3 => 4,
        Algorithm::Cqrgs => 2 * k - 1,
        Algorithm::Cqr2gs => 4 * k - 2,
        // CQR2 on panel 1, then four reduces (projection, Gram, correction,
        // Gram) for every later panel.
        Algorithm::Mcqr2gs => 2 + 4 * (k - 1),
    }
}

/// Difference between the tile-level call count of [`cqr2gs_cost`]
/// (`2k²` for `k = n/b` panels, `b | n`) and the collective entries of
/// [`collective_calls`] (`4k − 2`): `2(k − 1)²`, the tile reductions that a
/// single collective covers once the projections of one panel onto all
/// trailing tiles travel in one payload.
pub fn tile_call_surplus(panels: usize) -> f64 {
    let k = panels as f64;
    2.0 * (k - 1.0) * (k - 1.0)
}

/// Exact payload entries summed over all allreduces of one rank.
pub fn collective_words(algorithm: Algorithm, n: usize, spec: &PanelSpec) -> u64 {
    let n = n as u64;
    let widths: Vec<u64> = (0..spec.count())
        .map(|j| spec.columns(j).expect("in range").len() as u64)
        .collect();
    let cqrgs_pass = || {
        let mut start = 0;
        let mut total = 0;
        for &w in &widths {
            total += w * w + w * (n - start - w);
            start += w;
        }
        total
    };
    match algorithm {
        Algorithm::Cqr => n * n,
        Algorithm::Cqr2 => 2 * n * n,
        Algorithm::Scqr => n * n + 1,
        Algorithm::Scqr3 => 3 * n * n + 1,
        Algorithm::Cqrgs => cqrgs_pass(),
        Algorithm::Cqr2gs => 2 * cqrgs_pass(),
        Algorithm::Mcqr2gs => {
            let mut total = 2 * widths[0] * widths[0];
            let mut start = widths[0];
            for j in 1..widths.len() {
                let (prev, w) = (widths[j - 1], widths[j]);
                total += prev * (n - start) + 2 * w * w + start * w;
                start += w;
            }
            total
        }
    }
}
