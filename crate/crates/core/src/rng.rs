//! Seeded, portable random number generation.
//!
//! Every random draw in this crate comes from ChaCha8: a named, seedable
//! stream cipher RNG that behaves identically on every platform. A simulation
//! derives one generator per subsystem from the master seed using ChaCha's
//! independent stream counters, so changing how one subsystem consumes
//! randomness (say, the transport's drop decisions) never perturbs another
//! (the primary-user trajectories).

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Labels for the independent per-subsystem randomness streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Receiver noise realizations.
    Noise = 0,
    /// Primary-user on/off Markov transitions.
    Pu = 1,
    /// Primary-user constellation symbol draws.
    Symbols = 2,
    /// Message drop decisions in the transport.
    Transport = 3,
    /// Monte Carlo threshold calibration.
    Calibration = 4,
    /// Randomized allocation policy (baseline experiments).
    Allocation = 5,
    /// Synthetic training-set generation.
    Training = 6,
}

/// A seeded ChaCha8 generator. The project-wide RNG algorithm.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A generator on an independent stream derived from `master_seed`.
///
/// All streams share the seed but never overlap; see [`Stream`].
pub fn stream(master_seed: u64, which: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(which as u64);
    rng
}
