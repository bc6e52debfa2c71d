use nalgebra::DVector;

use crate::beamforming::{effective_channel_groups, BeamformerSet};
use crate::channel::{SignificantTapSet, TapChannelMatrix};
use crate::error::{Error, Result};
use crate::linalg::{inner, stack};
use crate::scalar::{abs2, Cx, Real};

/// SINR when the receiver locks to the aligned delay `k_max`, with beams
/// designed on the same (true) channel and taps:
///
/// `|h_Sigma^H f_Sigma|^2 / (sum_{i != 0} |g_Sigma[i]^H f_Sigma|^2 + sigma^2)`.
pub fn sinr_perfect<T: Real>(
    h: &TapChannelMatrix<T>,
    omega: &SignificantTapSet,
    beams: &BeamformerSet<T>,
    noise: T,
) -> Result<T> {
    if beams.taps != *omega || beams.vectors.len() != omega.len() {
        return Err(Error::DimensionMismatch("beams were designed for a different tap set".into()));
    }
    let groups = effective_channel_groups(h, omega);
    let f = stack(&beams.vectors);
    if f.len() != groups.h_sigma.len() {
        return Err(Error::DimensionMismatch("beam length differs from antenna count".into()));
    }
    let signal = abs2(inner(&groups.h_sigma, &f));
    let interference = groups.lags.iter().fold(T::zero(), |acc, (_, g)| acc + abs2(inner(g, &f)));
    Ok(signal / (interference + noise))
}

/// Partition of all (beam, tap) pairs by composite delay `j = kappa_l + k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelayGroupMap {
    pub j_min: usize,
    pub j_max: usize,
    /// `groups[j - j_min]` lists the `(l, k)` pairs arriving with delay `j`;
    /// `l` is the zero-based beam index.
    pub groups: Vec<Vec<(usize, usize)>>,
}

impl DelayGroupMap {
    pub fn group(&self, j: usize) -> &[(usize, usize)] {
        if j < self.j_min || j > self.j_max {
            return &[];
        }
        &self.groups[j - self.j_min]
    }

    pub fn delays(&self) -> std::ops::RangeInclusive<usize> {
        self.j_min..=self.j_max
    }
}

pub fn delay_group_map(kappas: &[usize], taps: usize) -> DelayGroupMap {
    assert!(!kappas.is_empty() && taps > 0, "need at least one beam and one tap");
    let j_min = *kappas.iter().min().unwrap();
    let j_max = kappas.iter().max().unwrap() + taps - 1;
    let mut groups = vec![Vec::new(); j_max - j_min + 1];
    for (l, &kappa) in kappas.iter().enumerate() {
        for k in 0..taps {
            groups[kappa + k - j_min].push((l, k));
        }
    }
    groups.iter_mut().for_each(|g| g.sort_unstable());
    DelayGroupMap { j_min, j_max, groups }
}

/// SINR at the strongest composite delay, plus that delay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LockedSinr<T> {
    pub sinr: T,
    pub locked_delay: usize,
}

/// Composite coefficient `sum_{(l,k) in group j} h[k]^H f_l` for every delay.
pub(crate) fn composite_coefficients<T: Real>(
    h: &TapChannelMatrix<T>,
    beams: &BeamformerSet<T>,
) -> (DelayGroupMap, Vec<Cx<T>>) {
    let dl = h.as_downlink();
    let map = delay_group_map(&beams.kappas, dl.num_taps());
    let taps: Vec<DVector<Cx<T>>> = (0..dl.num_taps()).map(|k| dl.tap(k)).collect();
    let coefficients = map
        .groups
        .iter()
        .map(|group| {
            group
                .iter()
                .fold(Cx::new(T::zero(), T::zero()), |acc, &(l, k)| acc + inner(&taps[k], &beams.vectors[l]))
        })
        .collect();
    (map, coefficients)
}

/// SINR of arbitrary beams and delays over the true channel when the receiver
/// locks to the strongest composite delay; ties go to the smallest delay.
pub fn sinr_estimated<T: Real>(
    h_true: &TapChannelMatrix<T>,
    beams: &BeamformerSet<T>,
    noise: T,
) -> Result<LockedSinr<T>> {
    if beams.antennas() != h_true.antennas() {
        return Err(Error::DimensionMismatch(format!(
            "beams have {} antennas, channel has {}",
            beams.antennas(),
            h_true.antennas()
        )));
    }
    let (map, coefficients) = composite_coefficients(h_true, beams);
    let powers: Vec<T> = coefficients.iter().map(|c| abs2(*c)).collect();
    let mut best = 0;
    for (idx, &p) in powers.iter().enumerate() {
        if p > powers[best] {
            best = idx;
        }
    }
    let interference = powers
        .iter()
        .enumerate()
        .filter(|(idx, _)| *idx != best)
        .fold(T::zero(), |acc, (_, p)| acc + *p);
    Ok(LockedSinr { sinr: powers[best] / (interference + noise), locked_delay: map.j_min + best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamforming::{mrt_beamformer, zf_beamformer};
    use nalgebra::DMatrix;

    #[test]
    fn group_map_small() {
        let map = delay_group_map(&[1, 0], 2);
        assert_eq!((map.j_min, map.j_max), (0, 2));
        assert_eq!(map.group(0), &[(1, 0)]);
        assert_eq!(map.group(1), &[(0, 0), (1, 1)]);
        assert_eq!(map.group(2), &[(0, 1)]);
        assert!(map.group(3).is_empty());
    }

    #[test]
    fn single_beam_groups_are_taps() {
        let map = delay_group_map(&[0], 5);
        for j in 0..5 {
            assert_eq!(map.group(j), &[(0, j)]);
        }
    }

    #[test]
    fn single_tap_mrt_sinr() {
        let mut m = DMatrix::zeros(3, 4);
        m.set_column(2, &DVector::from_vec(vec![Cx::new(1.0, 0.5), Cx::new(-0.2, 0.0), Cx::new(0.0, 2.0)]));
        let h = TapChannelMatrix::downlink(m);
        let omega = SignificantTapSet::new(vec![2]).unwrap();
        let beams = mrt_beamformer(&h, &omega, 2.0).unwrap();
        let g = sinr_perfect(&h, &omega, &beams, 0.1).unwrap();
        let expected = 2.0 * h.total_power() / 0.1;
        assert!((g / expected - 1.0f64).abs() < 1e-12);
        let locked = sinr_estimated(&h, &beams, 0.1).unwrap();
        assert_eq!(locked.locked_delay, 2);
        assert!((locked.sinr / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zf_nulls_isi_from_significant_taps() {
        let mut m = DMatrix::zeros(4, 5);
        let cols = [
            [Cx::new(1.0, 0.0), Cx::new(0.3, 0.1), Cx::new(-0.4, 0.2), Cx::new(0.0, 1.0)],
            [Cx::new(0.2, -0.7), Cx::new(1.0, 1.0), Cx::new(0.5, 0.0), Cx::new(-1.0, 0.3)],
        ];
        m.set_column(1, &DVector::from_row_slice(&cols[0]));
        m.set_column(3, &DVector::from_row_slice(&cols[1]));
        let h = TapChannelMatrix::downlink(m);
        let omega = SignificantTapSet::new(vec![1, 3]).unwrap();
        let beams = zf_beamformer(&h, &omega, 1.0).unwrap();
        let groups = effective_channel_groups(&h, &omega);
        let f = beams.stacked();
        let signal = abs2(inner(&groups.h_sigma, &f));
        let isi: f64 = groups.lags.iter().map(|(_, g)| abs2(inner(g, &f))).sum();
        assert!(isi <= 1e-18 * signal, "isi {isi:e} signal {signal:e}");
    }

    #[test]
    fn mismatched_beams_rejected() {
        let h = TapChannelMatrix::downlink(DMatrix::from_element(2, 3, Cx::new(1.0, 0.0)));
        let omega = SignificantTapSet::new(vec![0, 1]).unwrap();
        let other = SignificantTapSet::new(vec![0]).unwrap();
        let beams = mrt_beamformer(&h, &other, 1.0).unwrap();
        assert!(sinr_perfect(&h, &omega, &beams, 1.0).is_err());
        let wide = TapChannelMatrix::downlink(DMatrix::from_element(3, 3, Cx::new(1.0, 0.0)));
        assert!(sinr_estimated(&wide, &beams, 1.0).is_err());
    }
}
