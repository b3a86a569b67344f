//! Deterministic random streams.
//!
//! Every Monte Carlo trial draws from its own ChaCha8 stream: the key is
//! derived from the master seed and the 64-bit stream id is the trial index.
//! Trial `k` therefore sees the same numbers no matter which worker runs it
//! or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used for all sampling.
pub type TrialRng = ChaCha8Rng;

/// Returns the stream for trial `index` under `master_seed`.
pub fn trial_stream(master_seed: u64, index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent child seed, e.g. for the `index`-th point of a sweep.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    mix64(master_seed ^ mix64(index.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}
