use nalgebra::DVector;
use rand::Rng;

use super::SystemConfig;
use crate::rng::complex_gaussian;
use crate::scalar::{phasor, Cx, Real};

/// One propagation path: its array response scaled by the complex gain, and
/// its delay in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct Path<T: Real> {
    pub gain: DVector<Cx<T>>,
    pub delay: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSet<T: Real> {
    pub paths: Vec<Path<T>>,
}

impl<T: Real> PathSet<T> {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }
}

/// Half-wavelength ULA steering vector for angle `theta`.
fn steering<T: Real>(antennas: usize, theta: f64) -> DVector<Cx<T>> {
    let spatial = std::f64::consts::PI * theta.sin();
    DVector::from_fn(antennas, |m, _| phasor(T::lit(-spatial * m as f64)))
}

/// Draws `L` paths for `cfg`.
///
/// Each path is a half-wavelength ULA steering vector at an angle uniform in
/// `[-pi/2, pi/2]`, scaled by a `CN(0, g)` gain where `g` is the configured
/// path-gain variance. Delays are uniform over `[0, (K-1) Ts]`; on-grid delays
/// are integer tap indices redrawn until all paths occupy distinct taps.
pub fn generate_paths<T: Real, R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> PathSet<T> {
    let variance = cfg.path_gain_variance();
    let span = (cfg.taps - 1) as f64;
    let mut used = Vec::with_capacity(cfg.paths);
    let paths = (0..cfg.paths)
        .map(|_| {
            let theta = rng.random_range(-std::f64::consts::FRAC_PI_2..=std::f64::consts::FRAC_PI_2);
            let alpha: Cx<T> = complex_gaussian(rng, variance);
            let gain = steering::<T>(cfg.antennas, theta) * alpha;
            let delay_in_samples = if cfg.on_grid {
                let tap = loop {
                    let candidate = rng.random_range(0..cfg.taps);
                    if !used.contains(&candidate) {
                        break candidate;
                    }
                };
                used.push(tap);
                tap as f64
            } else {
                rng.random_range(0.0..=span)
            };
            Path { gain, delay: T::lit(delay_in_samples * cfg.sample_interval) }
        })
        .collect();
    PathSet { paths }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm_sqr;
    use crate::rng::{stream, Purpose};

    fn cfg() -> SystemConfig {
        SystemConfig { antennas: 8, taps: 25, paths: 3, on_grid: true, ..Default::default() }
    }

    #[test]
    fn single_on_grid_path_lands_on_a_tap() {
        let c = SystemConfig { paths: 1, ..cfg() };
        let ps: PathSet<f64> = generate_paths(&c, &mut stream(11, 0, Purpose::Channel));
        assert_eq!(ps.len(), 1);
        let k = ps.paths[0].delay / c.sample_interval;
        assert!((k - k.round()).abs() < 1e-9 && (0.0..=24.0).contains(&k.round()));
    }

    #[test]
    fn same_seed_same_paths() {
        let a: PathSet<f64> = generate_paths(&cfg(), &mut stream(5, 9, Purpose::Channel));
        let b: PathSet<f64> = generate_paths(&cfg(), &mut stream(5, 9, Purpose::Channel));
        assert_eq!(a, b);
    }

    #[test]
    fn on_grid_taps_are_distinct() {
        let c = SystemConfig { paths: 20, ..cfg() };
        for seed in 0..20 {
            let ps: PathSet<f64> = generate_paths(&c, &mut stream(seed, 0, Purpose::Channel));
            let mut taps: Vec<i64> =
                ps.paths.iter().map(|p| (p.delay / c.sample_interval).round() as i64).collect();
            taps.sort_unstable();
            taps.dedup();
            assert_eq!(taps.len(), 20);
        }
    }

    #[test]
    fn off_grid_delays_stay_in_range() {
        let c = SystemConfig { on_grid: false, paths: 5, ..cfg() };
        for seed in 0..50 {
            let ps: PathSet<f64> = generate_paths(&c, &mut stream(seed, 1, Purpose::Channel));
            for p in &ps.paths {
                assert!(p.delay >= 0.0 && p.delay <= 24.0 * c.sample_interval * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn gain_moment_matches_configured_variance() {
        let c = SystemConfig { paths: 1, ..cfg() };
        let draws = 10_000;
        let mean: f64 = (0..draws)
            .map(|s| {
                let ps: PathSet<f64> = generate_paths(&c, &mut stream(s, 0, Purpose::Channel));
                norm_sqr(&ps.paths[0].gain) / c.antennas as f64
            })
            .sum::<f64>()
            / draws as f64;
        let target = c.path_gain_variance();
        assert!((mean / target - 1.0).abs() < 0.05, "mean {mean:e} target {target:e}");
    }
}
