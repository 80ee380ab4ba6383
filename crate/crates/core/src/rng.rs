//! Seeded, splittable random streams.
//!
//! An [`RngSeed`] names a position in a tree of streams: the root seed plus a
//! path of child indices folded into a 64-bit stream id. Every stream is a
//! ChaCha8 keystream keyed by the root seed and selected by the stream id, so
//! sub-streams can be drawn in any order, on any thread, with identical output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Environment variable consulted for a seed when none is given explicitly.
pub const SEED_ENV: &str = "LATTICEPERM_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngSeed {
    pub fn new(seed: u64) -> Self {
        RngSeed { seed, stream: 0 }
    }

    /// Independent sub-stream `index` of this stream.
    pub fn child(&self, index: u64) -> RngSeed {
        RngSeed {
            seed: self.seed,
            stream: splitmix64(self.stream ^ splitmix64(index.wrapping_add(0x5eed))),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Seed from `LATTICEPERM_SEED`, if set and parseable.
    pub fn from_env() -> Option<RngSeed> {
        std::env::var(SEED_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(RngSeed::new)
    }
}
