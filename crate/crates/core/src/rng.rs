//! Deterministic random streams.
//!
//! Every chain and every baseline run owns one [`RngStream`]. Streams are
//! ChaCha8 generators keyed by the run seed, with the stream id selecting an
//! independent sequence, so chain `i` draws the same numbers whether chains
//! run sequentially or on a thread pool.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct RngStream(ChaCha8Rng);

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Stream `stream` of the generator seeded by `seed`.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream(rng)
    }

    /// The per-chain stream used by the hybrid optimizer. Stream 0 is left
    /// for run-level draws.
    pub fn for_chain(seed: u64, chain: usize) -> Self {
        Self::with_stream(seed, chain as u64 + 1)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}
