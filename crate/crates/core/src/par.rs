//! Chunked data-parallel execution with a sequential fallback.
//!
//! Work is split into a fixed number of chunks whose boundaries depend only
//! on the problem size, never on the thread pool. Each chunk derives its own
//! random stream from `(seed, chunk index)`, and results are concatenated in
//! chunk order, so a parallel run reproduces the sequential one bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Rows per work chunk in Monte Carlo loops.
pub const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise runs
    /// sequentially.
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps `f` over `0..n` and returns the results in index order.
pub fn map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Splits `0..total` into [`CHUNK`]-sized ranges.
pub fn chunk_ranges(total: usize) -> Vec<std::ops::Range<usize>> {
    (0..total.div_ceil(CHUNK))
        .map(|i| i * CHUNK..((i + 1) * CHUNK).min(total))
        .collect()
}

/// Counter-based substream for chunk `index` of a run seeded with `seed`.
pub fn substream(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn chunks_cover_range() {
        let r = chunk_ranges(2 * CHUNK + 5);
        assert_eq!(r.len(), 3);
        assert_eq!(r[2], 2 * CHUNK..2 * CHUNK + 5);
        assert!(chunk_ranges(0).is_empty());
    }

    #[test]
    fn parallel_matches_sequential() {
        let f = |i: usize| {
            let mut rng = substream(7, i);
            rng.random::<u64>()
        };
        let a = map_indexed(Execution::Sequential, 37, f);
        let b = map_indexed(Execution::Parallel, 37, f);
        assert_eq!(a, b);
    }

    #[test]
    fn substreams_differ() {
        let a: u64 = substream(1, 0).random();
        let b: u64 = substream(1, 1).random();
        assert_ne!(a, b);
    }
}
