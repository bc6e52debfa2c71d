//! OFDM baseline: per-subcarrier MRT with water-filling, and pilot-subcarrier
//! channel estimation with the same block-sparse recovery as the DAM uplink.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::rate::RateReport;
use crate::channel::TapChannelMatrix;
use crate::error::{Error, Result};
use crate::estimation::{bomp_estimate, EstimationResult, GreedyOptions, PilotMatrix};
use crate::linalg::{inner, norm, norm_sqr};
use crate::scalar::{abs2, cx_real, phasor, Cx, Real};

/// Frame geometry of the OFDM baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OfdmParams {
    pub subcarriers: usize,
    pub cyclic_prefix: usize,
    pub coherence_samples: usize,
}

impl OfdmParams {
    /// Whole OFDM symbols (with prefix) that fit in one coherence block.
    pub fn symbols_per_block(&self) -> usize {
        self.coherence_samples / (self.subcarriers + self.cyclic_prefix)
    }
}

/// Frequency response on every subcarrier:
/// `h_s = sum_k h_DL[k] exp(-j 2 pi k s / S)`.
pub fn ofdm_subcarrier_channels<T: Real>(
    h: &TapChannelMatrix<T>,
    subcarriers: usize,
) -> Result<Vec<DVector<Cx<T>>>> {
    let k = h.num_taps();
    if subcarriers < k {
        return Err(Error::InvalidConfig(format!(
            "{subcarriers} subcarriers cannot cover a {k}-tap channel"
        )));
    }
    let dl = h.as_downlink();
    let step = T::two_pi() / T::lit(subcarriers as f64);
    Ok((0..subcarriers)
        .map(|s| {
            let mut acc = DVector::zeros(dl.antennas());
            for tap in 0..k {
                // reduce k*s mod S first so the phase stays small
                let phase = -step * T::lit(((tap * s) % subcarriers) as f64);
                acc += dl.matrix().column(tap) * phasor(phase);
            }
            acc
        })
        .collect())
}

/// Rate-maximizing split of `total` over parallel channels with the given
/// gain-to-noise ratios.
///
/// Active channels share a water level `mu`, `p_s = mu - 1/g_s`; channels with
/// `1/g_s >= mu` (including zero gains) get nothing.
pub fn water_filling<T: Real>(gains: &[T], total: T) -> Result<Vec<T>> {
    if !(total > T::zero()) {
        return Err(Error::InvalidConfig("water-filling needs a positive power budget".into()));
    }
    let mut order: Vec<usize> = (0..gains.len()).filter(|&i| gains[i] > T::zero()).collect();
    if order.is_empty() {
        return Err(Error::NoPositiveGain);
    }
    order.sort_by(|&a, &b| gains[b].partial_cmp(&gains[a]).expect("gains are not NaN"));

    let mut inverse_sum = T::zero();
    let mut active = 0;
    let mut level = T::zero();
    for (n, &i) in order.iter().enumerate() {
        let inv = T::one() / gains[i];
        let candidate = (total + inverse_sum + inv) / T::lit((n + 1) as f64);
        if candidate <= inv {
            break;
        }
        inverse_sum += inv;
        active = n + 1;
        level = candidate;
    }
    let mut powers = vec![T::zero(); gains.len()];
    for &i in &order[..active] {
        powers[i] = level - T::one() / gains[i];
    }
    Ok(powers)
}

/// OFDM rate with per-subcarrier MRT designed on `h_design` and evaluated on
/// `h_true`, water-filled over the `S` subcarriers with a per-symbol budget of
/// `S * P_DL`.
///
/// Accounting: `n_sym = floor(n_c / (S + N_cp))` symbols per block, of which
/// `N_pilot` subcarrier slots carry pilots, so
/// `R = (n_sym S - N_pilot) / n_c * (1/S) sum_s log2(1 + p_s |h_s^H w_s|^2 / sigma^2)`.
pub fn ofdm_rate<T: Real>(
    h_true: &TapChannelMatrix<T>,
    h_design: &TapChannelMatrix<T>,
    params: &OfdmParams,
    pilot_subcarriers: usize,
    power: T,
    noise: T,
) -> Result<RateReport<T>> {
    let s = params.subcarriers;
    if pilot_subcarriers > s {
        return Err(Error::InvalidConfig(format!("{pilot_subcarriers} pilots exceed {s} subcarriers")));
    }
    let data_slots = params.symbols_per_block() * s;
    if data_slots <= pilot_subcarriers {
        return Err(Error::OverheadExceedsBlock { overhead: pilot_subcarriers, block: data_slots });
    }
    let truth = ofdm_subcarrier_channels(h_true, s)?;
    let design = ofdm_subcarrier_channels(h_design, s)?;
    let design_gains: Vec<T> = design.iter().map(|v| norm_sqr(v) / noise).collect();
    let powers = water_filling(&design_gains, T::lit(s as f64) * power)?;
    let mean_log: T = truth
        .iter()
        .zip(&design)
        .zip(&powers)
        .fold(T::zero(), |acc, ((h, w), &p)| {
            let w_norm = norm(w);
            if w_norm == T::zero() || p == T::zero() {
                return acc;
            }
            let gain = abs2(inner(h, w)) / (w_norm * w_norm) / noise;
            acc + (T::one() + p * gain).log2()
        })
        / T::lit(s as f64);
    let useful = T::lit((data_slots - pilot_subcarriers) as f64) / T::lit(params.coherence_samples as f64);
    Ok(RateReport {
        sinr: mean_log.exp2() - T::one(),
        rate: useful * mean_log,
        overhead_fraction: T::one() - useful,
        scheme: None,
        locked_delay: None,
    })
}

/// `N` pilot subcarriers spread as evenly as possible: `floor(p S / N)`.
pub fn equispaced_pilot_indices(subcarriers: usize, pilots: usize) -> Vec<usize> {
    (0..pilots).map(|p| p * subcarriers / pilots).collect()
}

/// Uplink OFDM pilot: BPSK symbols on a set of subcarriers, each sent with
/// power `power`.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmPilot<T: Real> {
    pub subcarriers: usize,
    pub indices: Vec<usize>,
    pub symbols: Vec<Cx<T>>,
    pub power: T,
}

impl<T: Real> OfdmPilot<T> {
    /// Partial-DFT dictionary `X[k][p] = sqrt(P) x_p exp(-j 2 pi k s_p / S)`,
    /// so pilot observations follow `Y = H_UL X + Z` exactly like the
    /// time-domain training.
    pub fn dictionary(&self, taps: usize) -> PilotMatrix<T> {
        let amp = self.power.sqrt();
        let step = T::two_pi() / T::lit(self.subcarriers as f64);
        PilotMatrix::from_matrix(DMatrix::from_fn(taps, self.indices.len(), |k, p| {
            let phase = -step * T::lit(((k * self.indices[p]) % self.subcarriers) as f64);
            phasor(phase) * self.symbols[p] * amp
        }))
    }
}

pub fn generate_ofdm_pilot<T: Real, R: Rng + ?Sized>(
    subcarriers: usize,
    pilots: usize,
    power: T,
    rng: &mut R,
) -> OfdmPilot<T> {
    OfdmPilot {
        subcarriers,
        indices: equispaced_pilot_indices(subcarriers, pilots),
        symbols: (0..pilots)
            .map(|_| cx_real(if rng.random::<bool>() { T::one() } else { -T::one() }))
            .collect(),
        power,
    }
}

/// Recovers the uplink tap channel from pilot-subcarrier observations
/// (`M x N_pilot`) with block OMP over the partial-DFT dictionary.
///
/// The per-subcarrier channels follow from the returned taps through
/// [`ofdm_subcarrier_channels`].
pub fn ofdm_channel_estimate<T: Real>(
    y_pilot: &DMatrix<Cx<T>>,
    pilot: &OfdmPilot<T>,
    taps: usize,
    options: &GreedyOptions<T>,
) -> Result<EstimationResult<T>> {
    if pilot.indices.len() != pilot.symbols.len() || y_pilot.ncols() != pilot.indices.len() {
        return Err(Error::DimensionMismatch("pilot indices, symbols and observations disagree".into()));
    }
    if pilot.subcarriers < taps {
        return Err(Error::InvalidConfig("fewer subcarriers than taps".into()));
    }
    bomp_estimate(y_pilot, &pilot.dictionary(taps), options)
}
