//! Counter-based random stream derivation.
//!
//! Every stream is a ChaCha8 generator keyed by `(master seed, trial, purpose)`,
//! so a trial draws the same numbers whether it runs alone, in a different
//! order, or on another thread.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scalar::{Cx, Real};

pub type SimRng = ChaCha8Rng;

/// What a stream is used for within one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Channel,
    /// Uplink pilot symbols and noise for a given pilot length.
    Training(u32),
    /// OFDM pilot subcarriers and noise for a given pilot count.
    OfdmTraining(u32),
    LinkSimulation,
    Other(u32),
}

impl Purpose {
    fn code(self) -> u64 {
        let (tag, value) = match self {
            Purpose::Channel => (1u64, 0u32),
            Purpose::Training(n) => (2, n),
            Purpose::OfdmTraining(n) => (3, n),
            Purpose::LinkSimulation => (4, 0),
            Purpose::Other(n) => (5, n),
        };
        (tag << 32) | u64::from(value)
    }
}

/// Independent stream for `(master, trial, purpose)`.
pub fn stream(master: u64, trial: u64, purpose: Purpose) -> SimRng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master.to_le_bytes());
    key[8..16].copy_from_slice(&trial.to_le_bytes());
    key[16..24].copy_from_slice(&purpose.code().to_le_bytes());
    key[24..].copy_from_slice(b"damsim\0\0");
    ChaCha8Rng::from_seed(key)
}

/// Circularly-symmetric complex Gaussian sample with the given variance.
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Cx<T> {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Cx::new(T::lit(scale * re), T::lit(scale * im))
}
