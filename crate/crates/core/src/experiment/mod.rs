//! Seeded Monte Carlo sweeps and their CSV records.
//!
//! Trial `t` of a run draws its channel from `stream(seed, t, Channel)` and
//! its training from `stream(seed, t, Training(N))`, so every series of a
//! sweep sees the same channels and a trial's numbers do not depend on which
//! thread runs it. Per-trial metrics are summed in trial order.

mod config_file;
mod csv;
mod demo;
mod sweeps;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use crate::channel::SystemConfig;
use crate::error::{Error, Result};

pub use config_file::parse_config;
pub use csv::{format_sig9, to_csv_string, write_csv, HEADER};
pub use demo::run_demo;
pub use sweeps::{run_nmse_sweep, run_rate_vs_pilot, run_rate_vs_power};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    NmseVsPilot,
    RateVsPilot,
    RateVsPower,
    Demo,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 4] =
        [ExperimentKind::NmseVsPilot, ExperimentKind::RateVsPilot, ExperimentKind::RateVsPower, ExperimentKind::Demo];

    pub fn tag(self) -> &'static str {
        match self {
            ExperimentKind::NmseVsPilot => "nmse-vs-pilot",
            ExperimentKind::RateVsPilot => "rate-vs-pilot",
            ExperimentKind::RateVsPower => "rate-vs-power",
            ExperimentKind::Demo => "demo",
        }
    }

    /// Pilot lengths for the pilot sweeps, downlink powers in dBm for
    /// rate-vs-power, a single pilot length for the demo.
    pub fn default_sweep(self) -> Vec<f64> {
        match self {
            ExperimentKind::NmseVsPilot => vec![10.0, 15.0, 20.0, 25.0, 30.0],
            ExperimentKind::RateVsPilot => (1..=8).map(|i| 5.0 * i as f64).collect(),
            ExperimentKind::RateVsPower => vec![20.0, 25.0, 30.0, 35.0, 40.0],
            ExperimentKind::Demo => vec![30.0],
        }
    }

    fn sweeps_pilot_length(self) -> bool {
        !matches!(self, ExperimentKind::RateVsPower)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown experiment {s:?}")))
    }
}

/// Stopping threshold the sweeps hand to the greedy estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stopping {
    /// Fraction of the measurement norm, the estimators' own default.
    Relative(f64),
    /// `scale * sigma * sqrt(group size)`: a group (block or atom) is kept
    /// only if it removes more residual norm than a fraction of what one
    /// noise-only group carries.
    NoiseScaled(f64),
}

impl Default for Stopping {
    fn default() -> Self {
        Stopping::NoiseScaled(0.5)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub sweep: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    pub config: SystemConfig,
    pub output: Option<PathBuf>,
    /// Pilot lengths compared in rate-vs-power.
    pub pilot_lengths: Vec<usize>,
    /// Drop the uplink noise during training.
    pub noiseless_training: bool,
    /// Symbols pushed through the simulated link in the demo.
    pub link_symbols: usize,
    pub stopping: Stopping,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, config: SystemConfig) -> Self {
        Self {
            kind,
            sweep: kind.default_sweep(),
            trials: 200,
            master_seed: 0,
            config,
            output: None,
            pilot_lengths: vec![15, 30],
            noiseless_training: false,
            link_symbols: 100_000,
            stopping: Stopping::default(),
        }
    }

    pub fn with_sweep(mut self, sweep: Vec<f64>) -> Self {
        self.sweep = sweep;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        self.config.validate()?;
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.sweep.is_empty() {
            return bad("sweep is empty".into());
        }
        if self.sweep.iter().any(|x| !x.is_finite()) {
            return bad("sweep values must be finite".into());
        }
        if self.sweep.windows(2).any(|w| !(w[0] < w[1])) {
            return bad(format!("sweep values must be strictly increasing: {:?}", self.sweep));
        }
        let pilots: Vec<usize> = if self.kind.sweeps_pilot_length() {
            self.pilot_sweep()?
        } else {
            if self.pilot_lengths.is_empty() {
                return bad("rate-vs-power needs at least one pilot length".into());
            }
            self.pilot_lengths.clone()
        };
        for n in pilots {
            self.config.validate_pilot(n)?;
        }
        match self.stopping {
            Stopping::Relative(x) | Stopping::NoiseScaled(x) if !(x >= 0.0 && x.is_finite()) => {
                return bad(format!("stopping threshold {x} must be finite and nonnegative"));
            }
            _ => {}
        }
        if self.kind == ExperimentKind::Demo && self.link_symbols == 0 {
            return bad("demo needs at least one link symbol".into());
        }
        Ok(())
    }

    /// Sweep values read as pilot lengths.
    pub fn pilot_sweep(&self) -> Result<Vec<usize>> {
        self.sweep
            .iter()
            .map(|&x| {
                if x >= 1.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
                    Ok(x as usize)
                } else {
                    Err(Error::InvalidConfig(format!("pilot length {x} is not a positive integer")))
                }
            })
            .collect()
    }

    fn expect(&self, kind: ExperimentKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::InvalidConfig(format!("spec is for {}, not {}", self.kind, kind)));
        }
        self.validate()
    }

    fn grid(&self) -> &'static str {
        grid_tag(self.config.on_grid)
    }
}

pub(crate) fn grid_tag(on_grid: bool) -> &'static str {
    if on_grid {
        "on"
    } else {
        "off"
    }
}

/// One aggregated point of one series.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub experiment: String,
    pub scheme: String,
    pub grid: String,
    pub x: f64,
    pub metric: String,
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// Runs the sweep experiment named by `spec.kind`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<SweepRecord>> {
    match spec.kind {
        ExperimentKind::NmseVsPilot => run_nmse_sweep(spec),
        ExperimentKind::RateVsPilot => run_rate_vs_pilot(spec),
        ExperimentKind::RateVsPower => run_rate_vs_power(spec),
        ExperimentKind::Demo => Err(Error::InvalidConfig("the demo produces a report, not records".into())),
    }
}

/// Records of a single series, in sweep order.
pub fn series<'a>(records: &'a [SweepRecord], scheme: &str, grid: &str) -> Vec<&'a SweepRecord> {
    records.iter().filter(|r| r.scheme == scheme && r.grid == grid).collect()
}

#[derive(Debug, Clone)]
pub(crate) struct SeriesSpec {
    pub scheme: String,
    pub grid: &'static str,
    pub metric: &'static str,
}

/// Runs `trial` for every trial index in parallel. Each call returns one
/// value per `(series, sweep point)`, series-major.
pub(crate) fn monte_carlo<F>(spec: &ExperimentSpec, layout: &[SeriesSpec], trial: F) -> Result<Vec<SweepRecord>>
where
    F: Fn(u64) -> Result<Vec<f64>> + Sync,
{
    let points = spec.sweep.len();
    let width = layout.len() * points;
    let samples: Vec<Vec<f64>> = (0..spec.trials as u64).into_par_iter().map(&trial).collect::<Result<_>>()?;
    if let Some(bad) = samples.iter().find(|s| s.len() != width) {
        return Err(Error::DimensionMismatch(format!("trial produced {} values, expected {width}", bad.len())));
    }
    let n = spec.trials as f64;
    let mut records = Vec::with_capacity(width);
    for (s, series) in layout.iter().enumerate() {
        for (p, &x) in spec.sweep.iter().enumerate() {
            let idx = s * points + p;
            let mean = samples.iter().map(|v| v[idx]).sum::<f64>() / n;
            let stderr = if spec.trials > 1 {
                let var = samples.iter().map(|v| (v[idx] - mean).powi(2)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            } else {
                0.0
            };
            records.push(SweepRecord {
                experiment: spec.kind.tag().to_string(),
                scheme: series.scheme.clone(),
                grid: series.grid.to_string(),
                x,
                metric: series.metric.to_string(),
                mean,
                stderr,
                trials: spec.trials,
            });
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.tag().parse::<ExperimentKind>().unwrap(), k);
        }
        assert!("fig4".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn spec_validation() {
        let base = ExperimentSpec::new(ExperimentKind::NmseVsPilot, SystemConfig::default());
        assert!(base.validate().is_ok());
        assert!(base.clone().with_trials(0).validate().is_err());
        assert!(base.clone().with_sweep(vec![10.0, 10.0]).validate().is_err());
        assert!(base.clone().with_sweep(vec![20.0, 10.0]).validate().is_err());
        assert!(base.clone().with_sweep(vec![10.5]).validate().is_err());
        assert!(base.clone().with_sweep(vec![]).validate().is_err());
        let power = ExperimentSpec::new(ExperimentKind::RateVsPower, SystemConfig::default());
        assert!(power.clone().with_sweep(vec![-10.0, 12.5]).validate().is_ok());
    }

    #[test]
    fn aggregation_is_mean_and_standard_error() {
        let spec = ExperimentSpec::new(ExperimentKind::NmseVsPilot, SystemConfig::default())
            .with_sweep(vec![1.0, 2.0])
            .with_trials(4);
        let layout = [SeriesSpec { scheme: "a".into(), grid: "on", metric: "m" }];
        let records = monte_carlo(&spec, &layout, |t| Ok(vec![t as f64, 1.0])).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].mean, 1.5);
        // sample std of 0..4 is sqrt(5/3)
        assert!((records[0].stderr - (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(records[1].stderr, 0.0);
        assert_eq!(records[1].x, 2.0);
    }
}
