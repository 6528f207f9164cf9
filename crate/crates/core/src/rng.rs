//! Seeded random streams.
//!
//! Every random draw in the crate comes from ChaCha8 (`rand_chacha`), keyed
//! by a 64-bit seed expanded with `SeedableRng::seed_from_u64` (PCG32
//! expansion, as documented in `rand_core`). Independent sub-streams are
//! selected with the ChaCha stream id, so a task identified by
//! `(seed, stream)` always sees the same sequence no matter which thread runs
//! it or in which order tasks are scheduled.
//!
//! Uniform reals are `rand`'s standard `f64` sampler: 53 random bits scaled
//! into `[0, 1)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Main stream for `seed`.
pub fn seeded(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent sub-stream `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives a child seed, used where a sub-task needs a full seed of its own
/// (e.g. the trainer inside a mixup run).
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    // SplitMix64 finalizer over the combined value.
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
