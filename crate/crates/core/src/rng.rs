//! Counter-based random streams.
//!
//! Every simulated series is keyed by `(seed, stream)`. ChaCha is a counter
//! cipher, so distinct stream ids give independent sequences without any
//! shared state, and replications can be generated in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
