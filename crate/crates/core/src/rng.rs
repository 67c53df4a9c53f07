//! Deterministic random streams.
//!
//! Every simulation splits its work into a fixed number of blocks; block `i`
//! draws from ChaCha8 keyed by the run seed with stream id `i`. Results
//! therefore depend only on `(seed, block index)`, never on the thread count.

use alloc::vec::Vec;
use core::ops::Range;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub use rand_core::RngCore as Rng;

/// Counter-based generator for one substream of a run.
pub fn stream(seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Uniform on the open interval (0, 1) with 53 bits of resolution.
#[inline]
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
}

/// Uniform index in `0..n` (Lemire's multiply-shift, bias < 2^-64 * n).
#[inline]
pub fn index<R: RngCore + ?Sized>(rng: &mut R, n: usize) -> usize {
    ((rng.next_u64() as u128 * n as u128) >> 64) as usize
}

/// Split `0..n` into `blocks` contiguous ranges of near-equal size.
pub fn block_ranges(n: usize, blocks: usize) -> Vec<Range<usize>> {
    let blocks = blocks.max(1);
    let base = n / blocks;
    let extra = n % blocks;
    let mut out = Vec::with_capacity(blocks);
    let mut start = 0;
    for b in 0..blocks {
        let len = base + usize::from(b < extra);
        out.push(start..start + len);
        start += len;
    }
    out
}

/// Run `f(block_index, range)` for every block and collect results in block
/// order. Parallel when the `rayon` feature is enabled.
pub fn map_blocks<T, F>(n: usize, blocks: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, Range<usize>) -> T + Sync + Send,
{
    let ranges = block_ranges(n, blocks);
    #[cfg(feature = "rayon")]
    {
        use rayon::prelude::*;
        ranges
            .into_par_iter()
            .enumerate()
            .map(|(i, r)| f(i, r))
            .collect()
    }
    #[cfg(not(feature = "rayon"))]
    {
        ranges.into_iter().enumerate().map(|(i, r)| f(i, r)).collect()
    }
}
