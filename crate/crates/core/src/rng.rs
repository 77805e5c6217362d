//! Seeded randomness for the rounding procedures.
//!
//! Every trial of a seeded run owns its own ChaCha stream, so trial `t` of
//! seed `s` draws the same values no matter how trials are scheduled.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The generator for trial `trial` of seed `seed`. Trial 0 is the plain
/// seeded generator.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Uniform draw from the open interval (0, 1).
pub fn open_unit(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}
