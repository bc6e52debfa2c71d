mod common;

use common::{config, gaussian_channel, training_instance};
use damsim::beamforming::{
    beamform, beamform_estimated, effective_channel_groups, mmse_beamformer, mrt_beamformer, zf_beamformer, Scheme,
};
use damsim::channel::{select_significant_taps, SignificantTapSet};
use damsim::estimation::{bomp_estimate, GreedyOptions};
use damsim::linalg::direction_angle;
use damsim::link::sinr_perfect;
use damsim::rng::{stream, Purpose};
use rand::seq::index::sample;
use rand::Rng;

fn random_omega(k: usize, max_len: usize, rng: &mut impl Rng) -> SignificantTapSet {
    let len = rng.random_range(1..=max_len);
    SignificantTapSet::new(sample(rng, k, len).into_vec()).unwrap()
}

#[test]
fn zf_nulls_every_other_significant_tap() {
    let mut rng = stream(41, 0, Purpose::Other(0));
    for trial in 0..100 {
        let h = gaussian_channel(16, 20, 41, trial);
        let omega = random_omega(20, 8, &mut rng);
        let zf = zf_beamformer(&h, &omega, 3.0).unwrap();
        for (l, f) in zf.vectors.iter().enumerate() {
            for (lp, &k) in omega.indices().iter().enumerate() {
                if lp != l {
                    let tap = h.tap(k);
                    assert!(tap.dotc(f).norm() <= 1e-10 * tap.norm() * f.norm());
                }
            }
        }
    }
}

#[test]
fn zf_example_four_antennas_two_taps() {
    let h = gaussian_channel(4, 3, 2, 0);
    let omega = SignificantTapSet::new(vec![0, 2]).unwrap();
    let zf = zf_beamformer(&h, &omega, 2.5).unwrap();
    let tap = h.tap(2);
    assert!(tap.dotc(&zf.vectors[0]).norm() <= 1e-10 * tap.norm() * zf.vectors[0].norm());
    assert!((zf.total_power() - 2.5).abs() <= 1e-12 * 2.5);
}

#[test]
fn every_scheme_spends_the_whole_budget() {
    let cfg = config(16, 25, 3, true);
    for trial in 0..20 {
        let inst = training_instance(&cfg, 20, 17, trial, cfg.noise_power());
        let est = bomp_estimate(&inst.y, &inst.pilot, &GreedyOptions::new(6)).unwrap();
        let h_hat = est.uplink().to_downlink().unwrap();
        let omega = select_significant_taps(&inst.downlink, cfg.tap_threshold).unwrap();
        let p = cfg.downlink_power();
        for scheme in Scheme::ALL {
            let perfect = beamform(scheme, &inst.downlink, &omega, p, cfg.noise_power()).unwrap();
            let estimated = beamform_estimated(scheme, &h_hat, cfg.tap_threshold, p, cfg.noise_power()).unwrap();
            for beams in [perfect, estimated] {
                assert!((beams.total_power() - p).abs() <= 1e-10 * p, "{scheme}");
            }
        }
    }
}

#[test]
fn mmse_beats_zf_and_mrt() {
    let mut rng = stream(43, 0, Purpose::Other(0));
    for trial in 0..100 {
        let h = gaussian_channel(8, 10, 43, trial);
        let omega = random_omega(10, 6, &mut rng);
        let noise = rng.random_range(0.1..10.0);
        let sinr = |scheme| {
            let beams = beamform(scheme, &h, &omega, 1.0, noise).unwrap();
            sinr_perfect(&h, &omega, &beams, noise).unwrap()
        };
        let best_other = sinr(Scheme::Zf).max(sinr(Scheme::Mrt));
        assert!(sinr(Scheme::Mmse) >= best_other - 1e-9, "trial {trial}");
    }
}

#[test]
fn single_path_schemes_coincide() {
    let cfg = config(16, 25, 1, true);
    for trial in 0..10 {
        let inst = training_instance(&cfg, 10, 5, trial, 0.0);
        let h = &inst.downlink;
        let omega = select_significant_taps(h, cfg.tap_threshold).unwrap();
        assert_eq!(omega.len(), 1);
        let (p, noise) = (cfg.downlink_power(), cfg.noise_power());
        let tap = h.tap(omega.k_max());
        let expected = p * tap.norm_squared() / noise;
        for scheme in Scheme::ALL {
            let beams = beamform(scheme, h, &omega, p, noise).unwrap();
            assert!(direction_angle(&beams.vectors[0], &tap) <= 1e-9, "{scheme}");
            let gamma = sinr_perfect(h, &omega, &beams, noise).unwrap();
            assert!((gamma - expected).abs() <= 1e-9 * expected, "{scheme}");
        }
    }
}

#[test]
fn mrt_is_scaled_channel() {
    let h = gaussian_channel(5, 6, 3, 0);
    let omega = SignificantTapSet::new(vec![1, 4]).unwrap();
    let mrt = mrt_beamformer(&h, &omega, 4.0).unwrap();
    let h_sigma = effective_channel_groups(&h, &omega).h_sigma;
    let scale = 2.0 / h_sigma.norm();
    for (l, &k) in omega.indices().iter().enumerate() {
        assert!((&mrt.vectors[l] - h.tap(k) * nalgebra::Complex::new(scale, 0.0)).norm() < 1e-14);
    }
    assert_eq!(mrt.kappas, vec![3, 0]);
}

#[test]
fn lag_blocks_follow_tap_offsets() {
    let h = gaussian_channel(2, 6, 4, 0);
    let omega = SignificantTapSet::new(vec![1, 4]).unwrap();
    let groups = effective_channel_groups(&h, &omega);
    for i in -5isize..=5 {
        if i == 0 {
            assert!(groups.lag(0).is_none());
            continue;
        }
        for (l, &k) in omega.indices().iter().enumerate() {
            let block = groups.block(i, l).unwrap();
            let src = k as isize - i;
            if (0..6).contains(&src) {
                assert_eq!(block, h.tap(src as usize));
            } else {
                assert!(block.iter().all(|z| z.norm() == 0.0));
            }
        }
    }
}

#[test]
fn mmse_rejects_bad_inputs() {
    let h = gaussian_channel(3, 4, 1, 0);
    let omega = SignificantTapSet::new(vec![0]).unwrap();
    assert!(mmse_beamformer(&h, &omega, 1.0, 0.0).is_err());
    assert!(mmse_beamformer(&h, &omega, -1.0, 1.0).is_err());
    let bad = SignificantTapSet::new(vec![7]).unwrap();
    assert!(mrt_beamformer(&h, &bad, 1.0).is_err());
}
