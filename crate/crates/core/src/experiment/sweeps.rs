use nalgebra::DMatrix;

use super::{grid_tag, monte_carlo, ExperimentKind, ExperimentSpec, SeriesSpec, Stopping, SweepRecord};
use crate::beamforming::{
    beamform, mmse_beamformer, zf_beamformer_rank_revealing, BeamformerSet, Scheme, ZF_RANK_TOLERANCE,
};
use crate::channel::{
    generate_paths, select_significant_taps, synthesize_taps, uplink_channel, SignificantTapSet, SystemConfig,
    TapChannelMatrix,
};
use crate::error::{Error, Result};
use crate::estimation::{
    bomp_estimate, build_pilot_matrix, generate_pilot, nmse, omp_estimate, simulate_uplink_rx, vec, Epsilon,
    GreedyOptions, PilotMatrix,
};
use crate::link::{achievable_rate, generate_ofdm_pilot, ofdm_channel_estimate, ofdm_rate, sinr_estimated, sinr_perfect, OfdmParams};
use crate::rng::{stream, Purpose};
use crate::scalar::Cx;

pub(crate) fn draw_channel(cfg: &SystemConfig, seed: u64, trial: u64) -> (crate::PathSet64, TapChannelMatrix<f64>) {
    let mut rng = stream(seed, trial, Purpose::Channel);
    let paths = generate_paths(cfg, &mut rng);
    let h = synthesize_taps(&paths, cfg);
    (paths, h)
}

/// Blocks kept by the block estimator: twice the path count, which leaves
/// room for the two strongest taps of each off-grid path.
pub(crate) fn block_budget(cfg: &SystemConfig) -> usize {
    (2 * cfg.paths).min(cfg.taps)
}

/// Estimator options for groups of `group` coefficients, at most `cap` groups.
pub(crate) fn estimator_options(spec: &ExperimentSpec, group: usize, cap: usize) -> GreedyOptions<f64> {
    let epsilon = match spec.stopping {
        Stopping::Relative(x) => Epsilon::Relative(x),
        Stopping::NoiseScaled(x) => Epsilon::Absolute(x * (noise_for(spec) * group as f64).sqrt()),
    };
    GreedyOptions::new(cap).with_epsilon(epsilon)
}

fn noise_for(spec: &ExperimentSpec) -> f64 {
    if spec.noiseless_training {
        0.0
    } else {
        spec.config.noise_power()
    }
}

pub(crate) struct Training {
    pub y: DMatrix<Cx<f64>>,
    pub pilot: PilotMatrix<f64>,
}

pub(crate) fn train(spec: &ExperimentSpec, h: &TapChannelMatrix<f64>, n: usize, trial: u64) -> Result<Training> {
    let cfg = &spec.config;
    let mut rng = stream(spec.master_seed, trial, Purpose::Training(n as u32));
    let seq = generate_pilot(n, cfg.taps, &mut rng);
    let pilot = build_pilot_matrix(&seq, cfg.taps, cfg.uplink_power())?;
    let y = simulate_uplink_rx(&uplink_channel(h)?, &pilot, noise_for(spec), &mut rng)?;
    Ok(Training { y, pilot })
}

/// Downlink channel recovered by block OMP from `N` time-domain pilots.
pub(crate) fn estimate_dam(spec: &ExperimentSpec, h: &TapChannelMatrix<f64>, n: usize, trial: u64) -> Result<TapChannelMatrix<f64>> {
    let t = train(spec, h, n, trial)?;
    let cfg = &spec.config;
    let est = bomp_estimate(&t.y, &t.pilot, &estimator_options(spec, cfg.antennas, block_budget(cfg)))?;
    est.uplink().to_downlink()
}

/// Downlink channel recovered from `N` OFDM pilot subcarriers.
fn estimate_ofdm(spec: &ExperimentSpec, h: &TapChannelMatrix<f64>, n: usize, trial: u64) -> Result<TapChannelMatrix<f64>> {
    let cfg = &spec.config;
    let mut rng = stream(spec.master_seed, trial, Purpose::OfdmTraining(n as u32));
    let pilot = generate_ofdm_pilot(cfg.subcarriers, n, cfg.uplink_power(), &mut rng);
    let dictionary = pilot.dictionary(cfg.taps);
    let y = simulate_uplink_rx(&uplink_channel(h)?, &dictionary, noise_for(spec), &mut rng)?;
    let est = ofdm_channel_estimate(&y, &pilot, cfg.taps, &estimator_options(spec, cfg.antennas, block_budget(cfg)))?;
    est.uplink().to_downlink()
}

fn ofdm_params(cfg: &SystemConfig) -> OfdmParams {
    OfdmParams { subcarriers: cfg.subcarriers, cyclic_prefix: cfg.cyclic_prefix, coherence_samples: cfg.coherence_samples }
}

/// Beams for the sweeps. Strict zero forcing needs linearly independent
/// significant taps, which off-grid paths spreading over neighbouring taps
/// routinely violate; those realizations fall back to the rank-revealing
/// projector. `None` means zero forcing has no direction left to send on.
pub(crate) fn design_beams(
    scheme: Scheme,
    h: &TapChannelMatrix<f64>,
    omega: &SignificantTapSet,
    power: f64,
    noise: f64,
) -> Result<Option<BeamformerSet<f64>>> {
    match beamform(scheme, h, omega, power, noise) {
        Ok(beams) => Ok(Some(beams)),
        Err(Error::IllConditioned { .. } | Error::ZfInfeasible { .. }) if scheme == Scheme::Zf => {
            match zf_beamformer_rank_revealing(h, omega, power, ZF_RANK_TOLERANCE) {
                Ok(beams) => Ok(Some(beams)),
                Err(Error::ZeroChannel) => Ok(None),
                Err(e) => Err(e),
            }
        }
        Err(e) => Err(e),
    }
}

/// Rate of `scheme` designed on the true channel, charged `pilot_len` samples.
fn perfect_rate(cfg: &SystemConfig, h: &TapChannelMatrix<f64>, scheme: Scheme, power: f64, pilot_len: usize) -> Result<f64> {
    let noise = cfg.noise_power();
    let omega = select_significant_taps(h, cfg.tap_threshold)?;
    let gamma = match design_beams(scheme, h, &omega, power, noise)? {
        Some(beams) => sinr_perfect(h, &omega, &beams, noise)?,
        None => 0.0,
    };
    Ok(achievable_rate(gamma, cfg.coherence_samples, cfg.guard_samples, pilot_len)?.rate)
}

/// Rate of `scheme` designed on `h_hat` and received over `h`.
fn estimated_rate(
    cfg: &SystemConfig,
    h: &TapChannelMatrix<f64>,
    h_hat: &TapChannelMatrix<f64>,
    scheme: Scheme,
    power: f64,
    pilot_len: usize,
) -> Result<f64> {
    let noise = cfg.noise_power();
    let omega_hat = select_significant_taps(h_hat, cfg.tap_threshold)?;
    let gamma = match design_beams(scheme, h_hat, &omega_hat, power, noise)? {
        Some(beams) => sinr_estimated(h, &beams, noise)?.sinr,
        None => 0.0,
    };
    Ok(achievable_rate(gamma, cfg.coherence_samples, cfg.guard_samples, pilot_len)?.rate)
}

/// NMSE of block OMP and atom-wise OMP, on-grid and off-grid, versus `N`.
///
/// Both grids share the trial's random draws; only the delay model differs.
pub fn run_nmse_sweep(spec: &ExperimentSpec) -> Result<Vec<SweepRecord>> {
    spec.expect(ExperimentKind::NmseVsPilot)?;
    let pilots = spec.pilot_sweep()?;
    let methods = ["bomp", "omp"];
    let grids = [true, false];
    let layout: Vec<SeriesSpec> = methods
        .iter()
        .flat_map(|m| grids.iter().map(move |&g| SeriesSpec { scheme: m.to_string(), grid: grid_tag(g), metric: "nmse" }))
        .collect();
    let points = pilots.len();
    monte_carlo(spec, &layout, |trial| {
        let mut out = vec![0.0; layout.len() * points];
        for (g, &on_grid) in grids.iter().enumerate() {
            let grid_spec = ExperimentSpec { config: SystemConfig { on_grid, ..spec.config.clone() }, ..spec.clone() };
            let cfg = &grid_spec.config;
            let (_, h) = draw_channel(cfg, spec.master_seed, trial);
            let truth = vec(uplink_channel(&h)?.matrix());
            let blocks = block_budget(cfg);
            for (p, &n) in pilots.iter().enumerate() {
                let t = train(&grid_spec, &h, n, trial)?;
                let block = bomp_estimate(&t.y, &t.pilot, &estimator_options(&grid_spec, cfg.antennas, blocks))?;
                let atoms = omp_estimate(&t.y, &t.pilot, &estimator_options(&grid_spec, 1, blocks * cfg.antennas))?;
                out[g * points + p] = nmse(block.d_hat().as_slice(), truth.as_slice())?;
                out[(grids.len() + g) * points + p] = nmse(atoms.d_hat().as_slice(), truth.as_slice())?;
            }
        }
        Ok(out)
    })
}

const RATE_SERIES: [&str; 8] = [
    "zf-perfect",
    "mrt-perfect",
    "mmse-perfect",
    "zf-estimated",
    "mrt-estimated",
    "mmse-estimated",
    "ofdm-perfect",
    "ofdm-estimated",
];

/// DAM with ZF/MRT/MMSE and the OFDM baseline, each with perfect and with
/// estimated CSI, versus the pilot length. Perfect-CSI series pay the same
/// pilot overhead as their estimated counterparts.
pub fn run_rate_vs_pilot(spec: &ExperimentSpec) -> Result<Vec<SweepRecord>> {
    spec.expect(ExperimentKind::RateVsPilot)?;
    let pilots = spec.pilot_sweep()?;
    let cfg = &spec.config;
    let layout: Vec<SeriesSpec> = RATE_SERIES
        .iter()
        .map(|s| SeriesSpec { scheme: s.to_string(), grid: spec.grid(), metric: "rate" })
        .collect();
    let points = pilots.len();
    let power = cfg.downlink_power();
    let noise = cfg.noise_power();
    let params = ofdm_params(cfg);
    monte_carlo(spec, &layout, |trial| {
        let (_, h) = draw_channel(cfg, spec.master_seed, trial);
        let mut out = vec![0.0; layout.len() * points];
        let mut put = |series: usize, p: usize, v: f64| out[series * points + p] = v;
        for (p, &n) in pilots.iter().enumerate() {
            let h_hat = estimate_dam(spec, &h, n, trial)?;
            for (s, scheme) in Scheme::ALL.into_iter().enumerate() {
                put(s, p, perfect_rate(cfg, &h, scheme, power, n)?);
                put(3 + s, p, estimated_rate(cfg, &h, &h_hat, scheme, power, n)?);
            }
            put(6, p, ofdm_rate(&h, &h, &params, n, power, noise)?.rate);
            let h_ofdm = estimate_ofdm(spec, &h, n, trial)?;
            put(7, p, ofdm_rate(&h, &h_ofdm, &params, n, power, noise)?.rate);
        }
        Ok(out)
    })
}

/// DAM schemes with estimated CSI for each configured pilot length, plus the
/// perfect-CSI MMSE bound (charged no pilot overhead), versus `P_DL` in dBm.
pub fn run_rate_vs_power(spec: &ExperimentSpec) -> Result<Vec<SweepRecord>> {
    spec.expect(ExperimentKind::RateVsPower)?;
    let cfg = &spec.config;
    let mut layout = vec![SeriesSpec { scheme: "mmse-perfect".into(), grid: spec.grid(), metric: "rate" }];
    for &n in &spec.pilot_lengths {
        for scheme in Scheme::ALL {
            layout.push(SeriesSpec { scheme: format!("{}-estimated-n{n}", scheme.tag()), grid: spec.grid(), metric: "rate" });
        }
    }
    let points = spec.sweep.len();
    let noise = cfg.noise_power();
    monte_carlo(spec, &layout, |trial| {
        let (_, h) = draw_channel(cfg, spec.master_seed, trial);
        let omega = select_significant_taps(&h, cfg.tap_threshold)?;
        let estimates: Vec<TapChannelMatrix<f64>> =
            spec.pilot_lengths.iter().map(|&n| estimate_dam(spec, &h, n, trial)).collect::<Result<_>>()?;
        let mut out = vec![0.0; layout.len() * points];
        for (p, &dbm) in spec.sweep.iter().enumerate() {
            let power = crate::channel::dbm_to_watts(dbm);
            let beams = mmse_beamformer(&h, &omega, power, noise)?;
            let gamma = sinr_perfect(&h, &omega, &beams, noise)?;
            out[p] = achievable_rate(gamma, cfg.coherence_samples, cfg.guard_samples, 0)?.rate;
            for (i, (&n, h_hat)) in spec.pilot_lengths.iter().zip(&estimates).enumerate() {
                for (s, scheme) in Scheme::ALL.into_iter().enumerate() {
                    let series = 1 + i * Scheme::ALL.len() + s;
                    out[series * points + p] = estimated_rate(cfg, &h, h_hat, scheme, power, n)?;
                }
            }
        }
        Ok(out)
    })
}
