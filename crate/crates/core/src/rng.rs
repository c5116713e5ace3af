//! Seeded random streams.
//!
//! Every random draw comes from a ChaCha8 generator. Independent substreams are
//! keyed by `(base seed, stream kind, index)` and mixed with SplitMix64, so a
//! given device or matrix row always sees the same numbers regardless of how
//! many other users or contents an instance has.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Catalog = 1,
    Device = 2,
    RequestRow = 3,
    SurrogateRow = 4,
    Seed = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of substream `index` of kind `stream` under `base`.
pub fn derive_seed(base: u64, stream: Stream, index: u64) -> u64 {
    let h = splitmix64(base ^ splitmix64(stream as u64));
    splitmix64(h ^ splitmix64(index.wrapping_add(0x632B_E59B_D9B4_E019)))
}

pub fn substream(base: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, stream, index))
}
