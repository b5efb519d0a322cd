//! Deterministic randomness plumbing.
//!
//! Every experiment draws from one 64-bit master seed. Independent work items
//! (path index in an ensemble, seed index in a sweep) get their own ChaCha
//! stream, so results do not depend on scheduling order or worker count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for work item `stream` under `master_seed`.
///
/// Streams are statistically independent for distinct indices, and the
/// mapping (seed, stream) -> byte stream is stable across platforms.
pub fn stream_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| stream_rng(7, 0).random()).collect();
        assert!(a.iter().all(|&v| v == a[0]));
        let x: u64 = stream_rng(7, 1).random();
        assert_ne!(a[0], x);
    }
}
