use crate::beamforming::Scheme;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Achievable rate after overhead, in bits per sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReport<T> {
    /// Linear SINR `gamma` (for OFDM, the SNR whose single-stream rate equals
    /// the subcarrier average).
    pub sinr: T,
    /// `(1 - overhead_fraction) log2(1 + sinr)`.
    pub rate: T,
    pub overhead_fraction: T,
    /// `None` for the OFDM baseline.
    pub scheme: Option<Scheme>,
    pub locked_delay: Option<usize>,
}

impl<T: Real> RateReport<T> {
    pub fn with_link(mut self, scheme: Scheme, locked_delay: usize) -> Self {
        self.scheme = Some(scheme);
        self.locked_delay = Some(locked_delay);
        self
    }
}

/// `R = (n_c - n_g - N) / n_c * log2(1 + gamma)`.
pub fn achievable_rate<T: Real>(
    gamma: T,
    coherence_samples: usize,
    guard_samples: usize,
    pilot_len: usize,
) -> Result<RateReport<T>> {
    let overhead = guard_samples + pilot_len;
    if overhead >= coherence_samples {
        return Err(Error::OverheadExceedsBlock { overhead, block: coherence_samples });
    }
    if !(gamma >= T::zero()) {
        return Err(Error::InvalidConfig(format!("SINR must be nonnegative, got {gamma}")));
    }
    let overhead_fraction = T::lit(overhead as f64) / T::lit(coherence_samples as f64);
    let rate = (T::one() - overhead_fraction) * (T::one() + gamma).log2();
    Ok(RateReport { sinr: gamma, rate, overhead_fraction, scheme: None, locked_delay: None })
}
