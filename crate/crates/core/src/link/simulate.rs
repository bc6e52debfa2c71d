use rand::Rng;

use crate::beamforming::BeamformerSet;
use crate::channel::TapChannelMatrix;
use crate::error::{Error, Result};
use crate::rng::complex_gaussian;
use crate::scalar::{abs2, Cx, Real};

/// Measured outcome of a time-domain link run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulatedLink<T> {
    pub sinr: T,
    pub locked_delay: usize,
    /// Estimated complex gain of the locked symbol stream.
    pub desired_gain: Cx<T>,
    /// Mean power left after removing the locked stream.
    pub impairment_power: T,
}

fn qpsk<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Cx<T> {
    let a = T::FRAC_1_SQRT_2();
    let re = if rng.random::<bool>() { a } else { -a };
    let im = if rng.random::<bool>() { a } else { -a };
    Cx::new(re, im)
}

/// Transmits `n_symbols` unit-power QPSK symbols through the delayed beams and
/// the true tap channel, then measures the SINR with a genie receiver.
///
/// The receiver knows the symbol stream: it estimates the gain at each
/// candidate delay by correlation, locks to the strongest one, subtracts that
/// stream and takes the remaining mean power as interference plus noise.
pub fn simulate_link<T: Real, R: Rng + ?Sized>(
    h_true: &TapChannelMatrix<T>,
    beams: &BeamformerSet<T>,
    noise: f64,
    n_symbols: usize,
    rng: &mut R,
) -> Result<SimulatedLink<T>> {
    let dl = h_true.as_downlink();
    let (m, k) = (dl.antennas(), dl.num_taps());
    if beams.vectors.iter().any(|f| f.len() != m) {
        return Err(Error::DimensionMismatch("beam length differs from antenna count".into()));
    }
    if n_symbols == 0 {
        return Err(Error::InvalidConfig("need at least one symbol".into()));
    }
    let max_kappa = beams.kappas.iter().copied().max().unwrap_or(0);
    let span = max_kappa + k - 1;

    // s[n] lives at index n + span for n in -span..n_symbols
    let symbols: Vec<Cx<T>> = (0..n_symbols + span).map(|_| qpsk(rng)).collect();

    // x[n] for n in -(k-1)..n_symbols, stored at n + k - 1
    let x_len = n_symbols + k - 1;
    let mut x = vec![Cx::new(T::zero(), T::zero()); x_len * m];
    for idx in 0..x_len {
        let n = idx as isize - (k as isize - 1);
        let sample = &mut x[idx * m..(idx + 1) * m];
        for (f, &kappa) in beams.vectors.iter().zip(&beams.kappas) {
            let s = symbols[(n - kappa as isize + span as isize) as usize];
            for (xa, fa) in sample.iter_mut().zip(f.iter()) {
                *xa += *fa * s;
            }
        }
    }

    // y[n] = sum_k h[k]^H x[n-k] + z[n]
    let h_conj: Vec<Cx<T>> = (0..k).flat_map(|tap| dl.matrix().column(tap).iter().map(|z| z.conj()).collect::<Vec<_>>()).collect();
    let y: Vec<Cx<T>> = (0..n_symbols)
        .map(|n| {
            let mut acc = Cx::new(T::zero(), T::zero());
            for tap in 0..k {
                let xi = (n + k - 1 - tap) * m;
                let hc = &h_conj[tap * m..(tap + 1) * m];
                for (a, b) in hc.iter().zip(&x[xi..xi + m]) {
                    acc += *a * *b;
                }
            }
            acc + complex_gaussian::<T, _>(rng, noise)
        })
        .collect();

    let inv_n = T::one() / T::lit(n_symbols as f64);
    let stream_at = |n: usize, j: usize| symbols[n + span - j];
    let gains: Vec<Cx<T>> = (0..=span)
        .map(|j| {
            y.iter()
                .enumerate()
                .fold(Cx::new(T::zero(), T::zero()), |acc, (n, yn)| acc + *yn * stream_at(n, j).conj())
                * inv_n
        })
        .collect();
    let mut locked = 0;
    for (j, g) in gains.iter().enumerate() {
        if abs2(*g) > abs2(gains[locked]) {
            locked = j;
        }
    }
    let desired = gains[locked];
    let impairment = y
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (n, yn)| acc + abs2(*yn - desired * stream_at(n, locked)))
        * inv_n;
    Ok(SimulatedLink {
        sinr: abs2(desired) / impairment,
        locked_delay: locked,
        desired_gain: desired,
        impairment_power: impairment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamforming::mrt_beamformer;
    use crate::channel::SignificantTapSet;
    use crate::rng::{stream, Purpose};
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn null_transmitter_gives_no_signal() {
        let h = TapChannelMatrix::downlink(DMatrix::from_element(2, 3, Cx::new(1.0, 0.0)));
        let omega = SignificantTapSet::new(vec![0, 2]).unwrap();
        let mut beams = mrt_beamformer(&h, &omega, 1.0).unwrap();
        beams.vectors.iter_mut().for_each(|f| f.fill(Cx::new(0.0, 0.0)));
        let out = simulate_link(&h, &beams, 0.5, 100_000, &mut stream(1, 0, Purpose::LinkSimulation)).unwrap();
        assert!(out.sinr < 1e-3, "{}", out.sinr);
    }

    #[test]
    fn single_tap_matches_analytic_snr() {
        let mut m = DMatrix::zeros(4, 5);
        m.set_column(
            3,
            &DVector::from_vec(vec![Cx::new(0.3, 0.1), Cx::new(-0.2, 0.4), Cx::new(0.0, -0.5), Cx::new(0.1, 0.1)]),
        );
        let h = TapChannelMatrix::downlink(m);
        let omega = SignificantTapSet::new(vec![3]).unwrap();
        let beams = mrt_beamformer(&h, &omega, 1.0).unwrap();
        let noise = 0.05;
        let analytic = h.total_power() / noise;
        let out = simulate_link(&h, &beams, noise, 100_000, &mut stream(2, 0, Purpose::LinkSimulation)).unwrap();
        let db = 10.0 * (out.sinr / analytic).log10();
        assert!(db.abs() < 0.2, "{db} dB");
        assert_eq!(out.locked_delay, 3);
    }
}
