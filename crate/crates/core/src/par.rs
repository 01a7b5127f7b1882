//! Chunked data-parallel evaluation.
//!
//! Work is split into fixed-size chunks whose results are collected in chunk
//! order, so every reduction performed by the caller sees the same sequence of
//! values whether the `parallel` feature is enabled or not.

/// Number of Monte Carlo samples drawn from one sub-stream.
pub const CHUNK: usize = 8192;

/// Number of chunks needed to cover `n` items.
pub fn chunk_count(n: usize) -> usize {
    n.div_ceil(CHUNK)
}

/// Half-open index range covered by chunk `j` of an `n`-item job.
pub fn chunk_range(j: usize, n: usize) -> std::ops::Range<usize> {
    let start = j * CHUNK;
    start..((j + 1) * CHUNK).min(n)
}

/// Evaluates `f` on every chunk index of an `n`-item job and returns the
/// per-chunk results in chunk order.
#[cfg(feature = "parallel")]
pub fn map_chunks<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..chunk_count(n)).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_chunks<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..chunk_count(n)).map(f).collect()
}

/// Parallel map over a slice, preserving order.
#[cfg(feature = "parallel")]
pub fn map_slice<A, T, F>(items: &[A], f: F) -> Vec<T>
where
    A: Sync,
    T: Send,
    F: Fn(&A) -> T + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_slice<A, T, F>(items: &[A], f: F) -> Vec<T>
where
    A: Sync,
    T: Send,
    F: Fn(&A) -> T + Sync + Send,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_range_in_order() {
        let n = 3 * CHUNK + 17;
        let parts = map_chunks(n, |j| chunk_range(j, n));
        assert_eq!(parts.len(), 4);
        let mut next = 0;
        for r in parts {
            assert_eq!(r.start, next);
            next = r.end;
        }
        assert_eq!(next, n);
    }
}
