//! Harness-side driver: scatter a global matrix, run one algorithm on P rank
//! bodies, gather Q, and collect communicator statistics.

use std::time::{Duration, Instant};

use crate::algos::{factor, Algorithm, FactorOptions, QrError};
use crate::comm::{gather_block_rows, run, Backend, CommError, CommStats};
use crate::dense::{Matrix, UpperTriangular};
use crate::dist::DistributedMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub ranks: usize,
    pub backend: Backend,
    pub options: FactorOptions,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm, ranks: usize) -> Self {
        Self {
            algorithm,
            ranks,
            backend: Backend::Serial,
            options: FactorOptions::default(),
        }
    }

    pub fn backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn panels(mut self, panels: usize) -> Self {
        self.options.panels = Some(panels);
        self
    }

    pub fn options(mut self, options: FactorOptions) -> Self {
        self.options = options;
        self
    }
}

/// Gathered factors.
#[derive(Debug, Clone)]
pub struct Factors {
    pub q: Matrix,
    pub r: UpperTriangular,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub factors: Result<Factors, QrError>,
    /// Rank 0's collective counters, including calls made before a breakdown.
    pub stats: CommStats,
    pub elapsed: Duration,
}

/// Runs `config.algorithm` on `a` split over `config.ranks` block rows.
///
/// `R` must come out bitwise identical on every rank; a mismatch is reported
/// as `ReplicaDivergence`.
pub fn run_factorization(a: &Matrix, config: &RunConfig) -> RunOutcome {
    let ranks = config.ranks;
    if ranks == 0 || ranks > a.rows() {
        return RunOutcome {
            factors: Err(CommError::InvalidPartition {
                rows: a.rows(),
                parts: ranks,
            }
            .into()),
            stats: CommStats::default(),
            elapsed: Duration::ZERO,
        };
    }
    let start = Instant::now();
    let per_rank = run(config.backend, ranks, |comm| async move {
        let dm = DistributedMatrix::from_global(comm, a);
        let result = factor(&dm, config.algorithm, &config.options).await;
        let stats = dm.comm().stats();
        (result.map(|f| (f.q.into_local(), f.r)), stats)
    });
    let elapsed = start.elapsed();

    let per_rank = match per_rank {
        Ok(v) => v,
        Err(e) => {
            return RunOutcome {
                factors: Err(e.into()),
                stats: CommStats::default(),
                elapsed,
            }
        }
    };
    let stats = per_rank[0].1;
    RunOutcome {
        factors: assemble(per_rank),
        stats,
        elapsed,
    }
}

type RankResult = (Result<(Matrix, UpperTriangular), QrError>, CommStats);

fn assemble(per_rank: Vec<RankResult>) -> Result<Factors, QrError> {
    let mut blocks = Vec::with_capacity(per_rank.len());
    let mut r0: Option<UpperTriangular> = None;
    for (rank, (result, _)) in per_rank.into_iter().enumerate() {
        let (q, r) = result?;
        match &r0 {
            None => r0 = Some(r),
            Some(first) if !first.bit_eq(&r) => return Err(QrError::ReplicaDivergence { rank }),
            Some(_) => {}
        }
        blocks.push(q);
    }
    Ok(Factors {
        q: gather_block_rows(&blocks)?,
        r: r0.expect("at least one rank"),
    })
}
