//! Replayable random streams.
//!
//! Every randomized run draws from xoshiro256++ seeded by SplitMix64 from
//! the user's seed. Worker `i` starts `i` jumps (2^128 steps each) into the
//! sequence, so streams never overlap and results do not depend on how
//! work is scheduled.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type Rng = Xoshiro256PlusPlus;

pub fn stream(seed: u64, worker: usize) -> Rng {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    for _ in 0..worker {
        rng.jump();
    }
    rng
}
