//! Data-parallel map facade.
//!
//! With the `parallel` feature (the default) index maps run on the rayon
//! global pool; without it the same API degrades to a plain sequential loop.
//! Results are collected in index order either way, so outputs are identical
//! regardless of worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f` to 0..n and collects the results in index order.
#[cfg(feature = "parallel")]
pub fn map_indices<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Applies `f` to 0..n and collects the results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_indices<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Always-sequential reference path (kept available in parallel builds for
/// benchmarking the dispatch overhead).
pub fn map_indices_seq<R, F>(n: usize, f: F) -> Vec<R>
where
    F: Fn(usize) -> R,
{
    (0..n).map(f).collect()
}
