#![allow(dead_code)]

use damsim::channel::{generate_paths, synthesize_taps, uplink_channel, SystemConfig, TapChannelMatrix};
use damsim::estimation::{build_pilot_matrix, generate_pilot, simulate_uplink_rx, PilotMatrix};
use damsim::rng::{complex_gaussian, stream, Purpose};
use damsim::Complex64;
use nalgebra::DMatrix;

pub struct Instance {
    pub downlink: TapChannelMatrix<f64>,
    pub uplink: TapChannelMatrix<f64>,
    pub pilot: PilotMatrix<f64>,
    pub y: DMatrix<Complex64>,
}

pub fn config(m: usize, k: usize, l: usize, on_grid: bool) -> SystemConfig {
    SystemConfig { antennas: m, taps: k, paths: l, on_grid, ..SystemConfig::default() }
}

/// Channel from the configured model plus `N` BPSK training samples.
pub fn training_instance(cfg: &SystemConfig, n: usize, seed: u64, trial: u64, noise: f64) -> Instance {
    let mut rng = stream(seed, trial, Purpose::Channel);
    let downlink = synthesize_taps(&generate_paths(cfg, &mut rng), cfg);
    let uplink = uplink_channel(&downlink).unwrap();
    let mut rng = stream(seed, trial, Purpose::Training(n as u32));
    let seq = generate_pilot(n, cfg.taps, &mut rng);
    let pilot = build_pilot_matrix(&seq, cfg.taps, cfg.uplink_power()).unwrap();
    let y = simulate_uplink_rx(&uplink, &pilot, noise, &mut rng).unwrap();
    Instance { downlink, uplink, pilot, y }
}

/// i.i.d. `CN(0, 1)` downlink tap matrix.
pub fn gaussian_channel(m: usize, k: usize, seed: u64, trial: u64) -> TapChannelMatrix<f64> {
    let mut rng = stream(seed, trial, Purpose::Other(0));
    TapChannelMatrix::downlink(DMatrix::from_fn(m, k, |_, _| complex_gaussian(&mut rng, 1.0)))
}

pub fn db(x: f64) -> f64 {
    10.0 * x.log10()
}
