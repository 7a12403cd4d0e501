//! Fixed-tree parallel reductions.
//!
//! Estimators must produce bit-identical results regardless of the rayon
//! thread count, so sample loops are split into fixed-size chunks, each chunk
//! is folded sequentially, and the per-chunk results are merged in index
//! order.

use rayon::prelude::*;
use std::ops::Range;

/// Chunk size for sample-indexed reductions. Fixed so the reduction tree
/// does not depend on the thread count.
pub const REDUCTION_CHUNK: usize = 1024;

/// Applies `f` to each fixed-size chunk of `0..n` in parallel and returns the
/// per-chunk results in index order.
pub fn par_chunk_map<A, F>(n: usize, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(Range<usize>) -> A + Sync + Send,
{
    let ranges: Vec<Range<usize>> = (0..n)
        .step_by(REDUCTION_CHUNK)
        .map(|start| start..(start + REDUCTION_CHUNK).min(n))
        .collect();
    ranges.into_par_iter().map(f).collect()
}

/// Deterministic parallel sum of `f(i)` over `0..n`.
pub fn par_sum(n: usize, f: impl Fn(usize) -> f64 + Sync) -> f64 {
    par_chunk_map(n, |range| range.map(&f).sum::<f64>())
        .into_iter()
        .sum()
}

pub fn add_assign(acc: &mut [f64], rhs: &[f64]) {
    debug_assert_eq!(acc.len(), rhs.len());
    for (a, r) in acc.iter_mut().zip(rhs) {
        *a += r;
    }
}

/// Interpolated quantile (type 7) of an unsorted slice; `q` in `[0, 1]`.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("NaN in quantile input"));
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}
