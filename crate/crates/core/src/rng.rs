//! Deterministic random streams. Every stochastic routine takes an explicit
//! seed; per-instance streams are derived with ChaCha's stream selector so
//! instance `i` of a batch is reproducible on its own.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn instance_stream(seed: u64, instance: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(instance);
    rng
}
