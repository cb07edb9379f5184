//! Data-parallel helpers with a sequential fallback.
//!
//! Every helper produces results that depend only on the inputs: work is split
//! by output element (column, row chunk, index), and each element is computed by
//! the same sequential loop whichever path runs. Enabling or disabling the
//! `parallel` feature therefore never changes a single bit of output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many scalar operations the sequential path is used even when
/// the `parallel` feature is enabled.
#[cfg_attr(not(feature = "parallel"), allow(dead_code))]
pub(crate) const MIN_PARALLEL_WORK: usize = 1 << 15;

/// Applies `f(j, column_j)` to every `rows`-long column of a column-major buffer.
pub(crate) fn for_each_column<F>(data: &mut [f64], rows: usize, work_per_column: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    if rows == 0 || data.is_empty() {
        return;
    }
    let cols = data.len() / rows;
    #[cfg(feature = "parallel")]
    if cols > 1 && cols.saturating_mul(work_per_column) >= MIN_PARALLEL_WORK {
        data.par_chunks_mut(rows)
            .enumerate()
            .for_each(|(j, col)| f(j, col));
        return;
    }
    let _ = (cols, work_per_column);
    data.chunks_mut(rows).enumerate().for_each(|(j, col)| f(j, col));
}

/// Evaluates `f` over `0..len` and collects the results in index order.
pub(crate) fn map_indices<T, F>(len: usize, work_per_index: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if len > 1 && len.saturating_mul(work_per_index) >= MIN_PARALLEL_WORK {
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = work_per_index;
    (0..len).map(f).collect()
}

/// Maps a slice of independent jobs, preserving order. Used for batch
/// evaluation (sweeps over condition numbers, seeds, panel counts).
pub fn map_jobs<I, T, F>(jobs: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        jobs.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        jobs.iter().map(f).collect()
    }
}

/// Whether the crate was built with the data-parallel path.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
