//! Splittable random streams.
//!
//! Every random draw in a run comes from a ChaCha8 generator keyed by the run
//! seed. Work items get their own ChaCha stream id, built from a purpose tag,
//! the generation index and the item index:
//!
//! ```text
//! stream = purpose << 56 | (generation mod 2^32) << 24 | (index mod 2^24)
//! ```
//!
//! Offspring `i` of generation `g` therefore always sees the same sequence no
//! matter which thread produces it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

const INDEX_BITS: u32 = 24;
const GENERATION_BITS: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Purpose {
    /// CVT sample draws and Lloyd initialisation.
    Centroids = 1,
    /// Initial population genotypes.
    Initial = 2,
    /// Parent selection and variation for one offspring.
    Offspring = 3,
    /// Anything outside the main loop (tests, demos).
    Auxiliary = 4,
}

/// Identifies one independent stream under a seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub purpose: Purpose,
    pub generation: u64,
    pub index: u64,
}

impl StreamKey {
    pub fn new(purpose: Purpose, generation: u64, index: u64) -> Self {
        StreamKey {
            purpose,
            generation,
            index,
        }
    }

    pub fn stream_id(&self) -> u64 {
        let generation = self.generation & ((1u64 << GENERATION_BITS) - 1);
        let index = self.index & ((1u64 << INDEX_BITS) - 1);
        ((self.purpose as u64) << 56) | (generation << INDEX_BITS) | index
    }
}

/// Returns the generator for `key` under `seed`.
pub fn stream(seed: u64, key: StreamKey) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(key.stream_id());
    rng
}

/// Shorthand for the offspring stream of generation `generation`, slot `index`.
pub fn offspring_stream(seed: u64, generation: u64, index: u64) -> StreamRng {
    stream(seed, StreamKey::new(Purpose::Offspring, generation, index))
}
