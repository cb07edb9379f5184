//! In-process P-rank communicator.
//!
//! Rank bodies are async functions that only synchronize through collectives.
//! The same body runs unchanged on either backend:
//!
//! * [`Backend::Serial`] polls all rank futures round-robin on the calling
//!   thread, so any rank count runs on one core.
//! * [`Backend::Parallel`] gives each rank its own OS thread; collectives
//!   block until every rank has arrived.
//!
//! Reductions are evaluated by whichever rank arrives last, always over the
//! same fixed tree (see [`tree_sum`]), so results are bitwise identical across
//! backends, schedules and repeated runs.

mod collective;
mod executor;

use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use thiserror::Error;

pub use collective::{tree_sum, Allreduce};
pub use executor::run;

use crate::dense::Matrix;
use collective::Shared;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CommError {
    #[error("rank {rank} sent a {actual:?} payload, rank 0 sent {expected:?}")]
    ShapeMismatch {
        rank: usize,
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error("rank {rank} returned before joining the collective")]
    RankExited { rank: usize },
    #[error("rank bodies made no progress")]
    Deadlock,
    #[error("cannot split {rows} rows over {parts} ranks")]
    InvalidPartition { rows: usize, parts: usize },
    #[error("block {index} has {actual} columns, expected {expected}")]
    ColumnMismatch {
        index: usize,
        expected: usize,
        actual: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// Interleaved rank bodies on the calling thread.
    #[default]
    Serial,
    /// One OS thread per rank.
    Parallel,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Serial => "serial",
            Backend::Parallel => "parallel",
        })
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "serial" | "serial-lockstep" => Ok(Backend::Serial),
            "parallel" | "shared-parallel" => Ok(Backend::Parallel),
            other => Err(format!("unknown backend `{other}` (expected serial or parallel)")),
        }
    }
}

#[derive(Debug, Default)]
struct EndpointState {
    seq: AtomicU64,
    calls: AtomicU64,
    words: AtomicU64,
}

/// One rank's endpoint. Clones share the endpoint identity (and its call
/// sequence), so a clone may be stored inside a distributed matrix.
#[derive(Clone)]
pub struct Communicator {
    rank: usize,
    size: usize,
    shared: Arc<Shared>,
    endpoint: Arc<EndpointState>,
}

/// Collective traffic observed by one endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CommStats {
    pub allreduce_calls: u64,
    /// Total payload entries contributed to allreduces.
    pub allreduce_words: u64,
}

impl Communicator {
    fn new(rank: usize, size: usize, shared: Arc<Shared>) -> Self {
        Self {
            rank,
            size,
            shared,
            endpoint: Arc::default(),
        }
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    /// Sum over all ranks, delivered identically to every rank.
    ///
    /// Must be entered by every rank in the same order. The payload shape
    /// must match rank 0's or every rank receives `ShapeMismatch`.
    pub fn allreduce_sum(&self, local: &Matrix) -> Allreduce {
        let seq = self.endpoint.seq.fetch_add(1, Ordering::SeqCst);
        self.endpoint.calls.fetch_add(1, Ordering::Relaxed);
        self.endpoint
            .words
            .fetch_add((local.rows() * local.cols()) as u64, Ordering::Relaxed);
        Allreduce::new(Arc::clone(&self.shared), self.rank, seq, local.clone())
    }

    /// Scalar convenience wrapper over [`allreduce_sum`](Self::allreduce_sum).
    pub async fn allreduce_scalar(&self, value: f64) -> Result<f64, CommError> {
        let out = self.allreduce_sum(&Matrix::from_rows(&[[value]])).await?;
        Ok(out.get(0, 0))
    }

    pub fn stats(&self) -> CommStats {
        CommStats {
            allreduce_calls: self.endpoint.calls.load(Ordering::Relaxed),
            allreduce_words: self.endpoint.words.load(Ordering::Relaxed),
        }
    }
}

impl fmt::Debug for Communicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Communicator")
            .field("rank", &self.rank)
            .field("size", &self.size)
            .finish()
    }
}

/// Rows owned by `rank` when `rows` are split over `parts` ranks: the first
/// `rows % parts` ranks get one extra row.
pub fn block_row_range(rows: usize, parts: usize, rank: usize) -> Range<usize> {
    let base = rows / parts;
    let extra = rows % parts;
    let start = rank * base + rank.min(extra);
    let len = base + usize::from(rank < extra);
    start..start + len
}

/// Splits `global` into `parts` contiguous block rows.
pub fn scatter_block_rows(global: &Matrix, parts: usize) -> Result<Vec<Matrix>, CommError> {
    if parts == 0 || parts > global.rows() {
        return Err(CommError::InvalidPartition {
            rows: global.rows(),
            parts,
        });
    }
    Ok((0..parts)
        .map(|p| global.row_block(block_row_range(global.rows(), parts, p)))
        .collect())
}

/// Stacks block rows in rank order.
pub fn gather_block_rows(blocks: &[Matrix]) -> Result<Matrix, CommError> {
    let cols = blocks.first().map_or(0, Matrix::cols);
    if let Some(index) = blocks.iter().position(|b| b.cols() != cols) {
        return Err(CommError::ColumnMismatch {
            index,
            expected: cols,
            actual: blocks[index].cols(),
        });
    }
    let rows: usize = blocks.iter().map(Matrix::rows).sum();
    let mut out = Matrix::zeros(rows, cols);
    let mut offset = 0;
    for b in blocks {
        out.set_block(offset, 0, b.view());
        offset += b.rows();
    }
    Ok(out)
}
