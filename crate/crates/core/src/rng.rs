//! Seeded random streams.
//!
//! Every random choice in the crate draws from ChaCha8 (`rand_chacha`),
//! keyed by a 64-bit seed expanded with `SeedableRng::seed_from_u64`, and
//! split into independent substreams through the ChaCha stream counter. A
//! `(seed, stream)` pair therefore names one fixed sequence on every
//! platform, regardless of how work is spread over threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// The generator for substream `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
