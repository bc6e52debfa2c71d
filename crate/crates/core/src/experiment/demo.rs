use std::fmt::Write;

use super::sweeps::{block_budget, design_beams, draw_channel, estimator_options, train};
use super::{ExperimentKind, ExperimentSpec};
use crate::beamforming::Scheme;
use crate::channel::{select_significant_taps, uplink_channel};
use crate::error::Result;
use crate::estimation::{bomp_estimate, nmse, vec};
use crate::link::{achievable_rate, simulate_link, sinr_estimated, sinr_perfect};
use crate::rng::{stream, Purpose};

fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// One end-to-end run on trial 0: the channel, the taps selected with
/// perfect and estimated CSI, and per-scheme SINR (analytic and simulated)
/// with the resulting rate. The pilot length is the first sweep value.
pub fn run_demo(spec: &ExperimentSpec) -> Result<String> {
    spec.expect(ExperimentKind::Demo)?;
    let cfg = &spec.config;
    let n = spec.pilot_sweep()?[0];
    let noise = cfg.noise_power();
    let power = cfg.downlink_power();
    let (paths, h) = draw_channel(cfg, spec.master_seed, 0);

    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "seed {}  M={} K={} L={}  grid={}", spec.master_seed, cfg.antennas, cfg.taps, cfg.paths, spec.grid()).unwrap();
    writeln!(w, "P_DL {} dBm  noise {} dBm  pilot N={}", cfg.p_dl_dbm, cfg.noise_dbm, n).unwrap();
    writeln!(w).unwrap();
    writeln!(w, "paths").unwrap();
    for (l, p) in paths.paths.iter().enumerate() {
        let delay = p.delay / cfg.sample_interval;
        writeln!(w, "  {l}  delay {delay:7.3} Ts  power {:+.2} dB", db(crate::linalg::norm_sqr(&p.gain))).unwrap();
    }
    writeln!(w, "channel power {:+.2} dB", db(h.total_power())).unwrap();

    let omega = select_significant_taps(&h, cfg.tap_threshold)?;
    writeln!(w, "significant taps {:?}  k_max {}", omega.indices(), omega.k_max()).unwrap();

    let t = train(spec, &h, n, 0)?;
    let est = bomp_estimate(&t.y, &t.pilot, &estimator_options(spec, cfg.antennas, block_budget(cfg)))?;
    let truth = vec(uplink_channel(&h)?.matrix());
    let h_hat = est.uplink().to_downlink()?;
    let omega_hat = select_significant_taps(&h_hat, cfg.tap_threshold)?;
    writeln!(
        w,
        "estimated support {:?}  nmse {:.3e}  stop {:?}",
        est.support,
        nmse(est.d_hat().as_slice(), truth.as_slice())?,
        est.termination
    )
    .unwrap();
    writeln!(w, "estimated significant taps {:?}", omega_hat.indices()).unwrap();
    writeln!(w).unwrap();

    writeln!(w, "{:<6}{:<11}{:>14}{:>15}{:>8}{:>12}", "scheme", "csi", "analytic dB", "simulated dB", "lock", "rate").unwrap();
    for (s, scheme) in Scheme::ALL.into_iter().enumerate() {
        for (c, estimated) in [false, true].into_iter().enumerate() {
            let (design, taps) = if estimated { (&h_hat, &omega_hat) } else { (&h, &omega) };
            let csi = if estimated { "estimated" } else { "perfect" };
            let Some(beams) = design_beams(scheme, design, taps, power, noise)? else {
                writeln!(w, "{:<6}{:<11}{:>14}{:>15}{:>8}{:>12.4}", scheme.tag(), csi, "-inf", "-", "-", 0.0).unwrap();
                continue;
            };
            let (analytic, lock) = if estimated {
                let locked = sinr_estimated(&h, &beams, noise)?;
                (locked.sinr, locked.locked_delay)
            } else {
                (sinr_perfect(&h, &omega, &beams, noise)?, omega.k_max())
            };
            let mut rng = stream(spec.master_seed, 0, Purpose::Other((2 * s + c) as u32));
            let sim = simulate_link(&h, &beams, noise, spec.link_symbols, &mut rng)?;
            let rate = achievable_rate(analytic, cfg.coherence_samples, cfg.guard_samples, n)?.rate;
            writeln!(
                w,
                "{:<6}{:<11}{:>14.3}{:>15.3}{:>8}{:>12.4}",
                scheme.tag(),
                csi,
                db(analytic),
                db(sim.sinr),
                lock,
                rate
            )
            .unwrap();
        }
    }
    Ok(out)
}
