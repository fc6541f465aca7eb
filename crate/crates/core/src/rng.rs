//! Counter-based random streams.
//!
//! Each work item `index` under a master `seed` gets its own ChaCha8 stream,
//! so draws depend only on `(seed, index)` and not on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
