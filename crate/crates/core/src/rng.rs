//! Seeded, splittable random streams.
//!
//! Every consumer of randomness asks for a `(seed, stream)` pair. The seed
//! keys a ChaCha8 generator and the stream selects one of its 2^64
//! independent counter-based sequences, so sub-tasks (initialization, data,
//! noise, per-draw sweeps) never share state and can be regenerated in any
//! order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type LabRng = ChaCha8Rng;

/// Root of a family of independent random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStream {
    seed: u64,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Generator for a numbered stream.
    pub fn stream(&self, stream: u64) -> LabRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    /// Derived child family, e.g. one per sweep cell.
    pub fn child(&self, index: u64) -> SeedStream {
        // splitmix64 finalizer over (seed, index)
        let mut z = self
            .seed
            .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        SeedStream::new(z ^ (z >> 31))
    }
}

/// Well-known stream ids, so unrelated draws stay decoupled.
pub mod streams {
    pub const INIT: u64 = 1;
    pub const DATA: u64 = 2;
    pub const NOISE: u64 = 3;
    pub const HOLDOUT: u64 = 4;
    pub const STEP2: u64 = 5;
    pub const TEST: u64 = 6;
    pub const SHIFT: u64 = 7;
    pub const BIAS: u64 = 8;
    pub const MC: u64 = 9;
}
