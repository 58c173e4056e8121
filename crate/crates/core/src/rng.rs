//! Chunked random streams.
//!
//! Every sampler splits its `n` draws into fixed-size chunks. Chunk `c` draws from
//! a ChaCha8 generator keyed by the user seed on stream `c`, so the output depends
//! only on `(seed, n)` and never on how chunks are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Number of draws per chunk.
pub const CHUNK_SIZE: usize = 1 << 14;

pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Runs `draw` for each of `n` samples on the chunked streams, in parallel, and
/// returns the results in sample order.
pub fn par_samples<T, F>(seed: u64, n: usize, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK_SIZE);
    let per_chunk: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c as u64);
            let len = CHUNK_SIZE.min(n - c * CHUNK_SIZE);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    per_chunk.into_iter().flatten().collect()
}
