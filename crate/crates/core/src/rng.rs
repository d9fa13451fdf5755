//! Counter-based random streams.
//!
//! Every realization draws from its own ChaCha stream keyed by
//! `(seed, realization index)`, so results do not depend on how
//! realizations are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream index reserved for experiment-scope draws (coherent noise).
const EXPERIMENT_STREAM: u64 = u64::MAX;

/// Key offsets separating the independent stream families of one seed.
const MEASUREMENT_KEY: u64 = 0x6a09_e667_f3bc_c908;
const TASK_KEY: u64 = 0xbb67_ae85_84ca_a73b;

/// Circuit stream for realization `index`: rotations and coefficient draws.
pub fn realization_stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Stream for draws made once per experiment.
pub fn experiment_stream(seed: u64) -> StreamRng {
    realization_stream(seed, EXPERIMENT_STREAM)
}

/// Measurement-outcome stream for realization `index`; independent of the
/// circuit stream so exact-trace and sampled runs share circuits.
pub fn measurement_stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ MEASUREMENT_KEY);
    rng.set_stream(index);
    rng
}

/// Seed for the `task`-th sub-experiment derived from a parent seed.
pub fn derive_seed(seed: u64, task: u64) -> u64 {
    use rand::RngCore;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ TASK_KEY);
    rng.set_stream(task);
    rng.next_u64()
}
