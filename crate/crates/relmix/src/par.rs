//! Data-parallel helpers. With the `parallel` feature (default) these fan
//! out over rayon's thread pool; without it they degrade to sequential
//! loops with identical results.

use crate::error::Result;

#[cfg(feature = "parallel")]
pub fn try_map_indexed<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn try_map_indexed<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    try_map_indexed_seq(n, f)
}

/// Sequential reference path, always available (benchmarked against the
/// parallel one).
pub fn try_map_indexed_seq<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..n).map(f).collect()
}
