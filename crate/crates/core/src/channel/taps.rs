use nalgebra::{DMatrix, DVector};

use super::pulse::raised_cosine_normalized;
use super::{PathSet, SystemConfig};
use crate::error::{Error, Result};
use crate::scalar::{abs2, Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Downlink,
    Uplink,
}

impl Direction {
    fn name(self) -> &'static str {
        match self {
            Direction::Downlink => "downlink",
            Direction::Uplink => "uplink",
        }
    }
}

/// Sampled `M x K` tap-domain channel.
///
/// In downlink convention column `k` holds `h_DL[k]`, the vector whose
/// Hermitian transpose multiplies the transmitted sample, so the received
/// signal is `y[n] = sum_k h_DL[k]^H x[n-k]`. The uplink channel seen by the
/// base station is the plain transpose of that row vector, which makes each
/// uplink column the element-wise conjugate of the downlink one.
#[derive(Debug, Clone, PartialEq)]
pub struct TapChannelMatrix<T: Real> {
    taps: DMatrix<Cx<T>>,
    direction: Direction,
}

impl<T: Real> TapChannelMatrix<T> {
    pub fn downlink(taps: DMatrix<Cx<T>>) -> Self {
        Self { taps, direction: Direction::Downlink }
    }

    pub fn uplink(taps: DMatrix<Cx<T>>) -> Self {
        Self { taps, direction: Direction::Uplink }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn antennas(&self) -> usize {
        self.taps.nrows()
    }

    pub fn num_taps(&self) -> usize {
        self.taps.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<Cx<T>> {
        &self.taps
    }

    pub fn into_matrix(self) -> DMatrix<Cx<T>> {
        self.taps
    }

    pub fn tap(&self, k: usize) -> DVector<Cx<T>> {
        self.taps.column(k).into_owned()
    }

    /// `||h[k]||^2` for every tap.
    pub fn tap_powers(&self) -> Vec<T> {
        self.taps
            .column_iter()
            .map(|c| c.iter().fold(T::zero(), |acc, z| acc + abs2(*z)))
            .collect()
    }

    pub fn total_power(&self) -> T {
        self.tap_powers().into_iter().fold(T::zero(), |a, b| a + b)
    }

    /// Downlink view of this channel regardless of its stored convention.
    pub fn as_downlink(&self) -> Self {
        match self.direction {
            Direction::Downlink => self.clone(),
            Direction::Uplink => Self::downlink(self.taps.map(|z| z.conj())),
        }
    }

    /// Inverse of [`uplink_channel`].
    pub fn to_downlink(&self) -> Result<Self> {
        match self.direction {
            Direction::Uplink => Ok(Self::downlink(self.taps.map(|z| z.conj()))),
            Direction::Downlink => Err(Error::WrongDirection(Direction::Downlink.name())),
        }
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self { taps: self.taps.map(|z| z * factor), direction: self.direction }
    }
}

/// Samples the pulse-shaped multipath response at the `K` tap instants:
/// `h_DL[k] = sum_l h_l p(k Ts - tau_l)`.
pub fn synthesize_taps<T: Real>(paths: &PathSet<T>, cfg: &SystemConfig) -> TapChannelMatrix<T> {
    let ts = T::lit(cfg.sample_interval);
    let beta = T::lit(cfg.rolloff);
    let mut taps = DMatrix::zeros(cfg.antennas, cfg.taps);
    for path in &paths.paths {
        let offset = path.delay / ts;
        for k in 0..cfg.taps {
            let weight = raised_cosine_normalized(T::lit(k as f64) - offset, beta);
            let mut column = taps.column_mut(k);
            column += &path.gain * Cx::new(weight, T::zero());
        }
    }
    TapChannelMatrix::downlink(taps)
}

/// Reciprocal uplink channel of a downlink tap matrix.
pub fn uplink_channel<T: Real>(h: &TapChannelMatrix<T>) -> Result<TapChannelMatrix<T>> {
    match h.direction {
        Direction::Downlink => Ok(TapChannelMatrix::uplink(h.taps.map(|z| z.conj()))),
        Direction::Uplink => Err(Error::WrongDirection(Direction::Uplink.name())),
    }
}

/// Ascending set of taps whose power reaches a fraction of the strongest tap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignificantTapSet {
    indices: Vec<usize>,
}

impl SignificantTapSet {
    /// Builds a set from tap indices; they are sorted and deduplicated.
    /// Returns `None` for an empty list.
    pub fn new(mut indices: Vec<usize>) -> Option<Self> {
        indices.sort_unstable();
        indices.dedup();
        (!indices.is_empty()).then_some(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn k_max(&self) -> usize {
        *self.indices.last().expect("set is never empty")
    }

    pub fn contains(&self, k: usize) -> bool {
        self.indices.binary_search(&k).is_ok()
    }
}

/// `{ k : ||h[k]||^2 >= threshold * max_k ||h[k]||^2 }`.
pub fn select_significant_taps<T: Real>(
    h: &TapChannelMatrix<T>,
    threshold: T,
) -> Result<SignificantTapSet> {
    select_from_powers(&h.tap_powers(), threshold)
}

pub(crate) fn select_from_powers<T: Real>(powers: &[T], threshold: T) -> Result<SignificantTapSet> {
    let peak = powers.iter().copied().fold(T::zero(), |a, b| a.max(b));
    if !(peak > T::zero()) {
        return Err(Error::DegenerateChannel);
    }
    let floor = threshold * peak;
    let indices = powers
        .iter()
        .enumerate()
        .filter(|(_, p)| **p >= floor)
        .map(|(k, _)| k)
        .collect();
    Ok(SignificantTapSet { indices })
}
