//! Seeded generator shared by every randomized construction.
//!
//! ChaCha8 keyed by `seed_from_u64(seed)`, with the attempt index used as the
//! stream id. Integer draws go through `u64` ranges so results do not depend
//! on the platform's pointer width.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub(crate) fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn index_below<R: Rng>(rng: &mut R, n: usize) -> usize {
    rng.gen_range(0..n as u64) as usize
}
