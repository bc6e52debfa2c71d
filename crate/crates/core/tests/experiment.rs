use damsim::channel::SystemConfig;
use damsim::experiment::{
    parse_config, run_demo, run_experiment, run_nmse_sweep, run_rate_vs_pilot, series, to_csv_string, ExperimentKind,
    ExperimentSpec, HEADER,
};

fn spec(kind: ExperimentKind, trials: usize) -> ExperimentSpec {
    ExperimentSpec::new(kind, SystemConfig::default()).with_trials(trials).with_seed(7)
}

#[test]
fn repeated_runs_are_byte_identical() {
    for kind in [ExperimentKind::NmseVsPilot, ExperimentKind::RateVsPilot, ExperimentKind::RateVsPower] {
        let s = spec(kind, 3).with_sweep(kind.default_sweep()[..2].to_vec());
        let a = to_csv_string(&run_experiment(&s).unwrap());
        let b = to_csv_string(&run_experiment(&s).unwrap());
        assert_eq!(a, b, "{kind}");
        let other = to_csv_string(&run_experiment(&s.clone().with_seed(8)).unwrap());
        assert_ne!(a, other, "{kind}");
    }
}

#[test]
fn single_trial_runs_are_reproducible() {
    let s = spec(ExperimentKind::NmseVsPilot, 1);
    let a = to_csv_string(&run_nmse_sweep(&s).unwrap());
    assert_eq!(a, to_csv_string(&run_nmse_sweep(&s).unwrap()));
    assert!(a.lines().skip(1).all(|l| l.ends_with(",0,1")));
}

#[test]
fn csv_rows_follow_the_schema() {
    let s = spec(ExperimentKind::RateVsPilot, 2).with_sweep(vec![10.0, 20.0]);
    let records = run_rate_vs_pilot(&s).unwrap();
    let text = to_csv_string(&records);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(HEADER));
    assert_eq!(HEADER, "experiment,scheme,grid,x,metric,mean,stderr,trials");
    let mut rows = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 8, "{line}");
        assert_eq!(f[0], "rate-vs-pilot");
        assert!(f[2] == "on" || f[2] == "off");
        assert!(["10", "20"].contains(&f[3]));
        assert_eq!(f[4], "rate");
        assert!(f[5].parse::<f64>().unwrap().is_finite());
        assert!(f[6].parse::<f64>().unwrap() >= 0.0);
        assert_eq!(f[7], "2");
        rows += 1;
    }
    // eight series times two points
    assert_eq!(rows, 16);
}

#[test]
fn nmse_sweep_has_four_series_over_the_grid() {
    let s = spec(ExperimentKind::NmseVsPilot, 2);
    let records = run_nmse_sweep(&s).unwrap();
    for scheme in ["bomp", "omp"] {
        for grid in ["on", "off"] {
            let xs: Vec<f64> = series(&records, scheme, grid).iter().map(|r| r.x).collect();
            assert_eq!(xs, s.sweep, "{scheme}/{grid}");
        }
    }
    assert_eq!(records.len(), 20);
}

#[test]
fn noiseless_training_recovers_on_grid_channels() {
    let mut s = spec(ExperimentKind::NmseVsPilot, 10).with_sweep(vec![40.0]);
    s.noiseless_training = true;
    let records = run_nmse_sweep(&s).unwrap();
    let bomp = series(&records, "bomp", "on")[0];
    assert!(bomp.mean <= 1e-8, "{}", bomp.mean);
}

#[test]
fn perfect_csi_rate_loses_exactly_the_pilot_overhead() {
    let s = spec(ExperimentKind::RateVsPilot, 3).with_sweep(vec![10.0, 20.0, 30.0]);
    let records = run_rate_vs_pilot(&s).unwrap();
    let cfg = &s.config;
    for scheme in ["zf-perfect", "mrt-perfect", "mmse-perfect"] {
        let pts = series(&records, scheme, "on");
        // R(N) = (n_c - n_g - N)/n_c * log2(1+gamma): slope -log2(1+gamma)/n_c
        let log = pts[0].mean * cfg.coherence_samples as f64 / (cfg.coherence_samples - cfg.guard_samples - 10) as f64;
        for w in pts.windows(2) {
            assert!(w[1].mean < w[0].mean);
            let slope = (w[1].mean - w[0].mean) / (w[1].x - w[0].x);
            assert!((slope + log / cfg.coherence_samples as f64).abs() <= 1e-12 * log, "{scheme}");
        }
    }
}

#[test]
fn invalid_specs_are_rejected() {
    assert!(run_nmse_sweep(&spec(ExperimentKind::NmseVsPilot, 0)).is_err());
    assert!(run_nmse_sweep(&spec(ExperimentKind::RateVsPilot, 1)).is_err());
    assert!(run_nmse_sweep(&spec(ExperimentKind::NmseVsPilot, 1).with_sweep(vec![20.0, 10.0])).is_err());
    let err = run_experiment(&spec(ExperimentKind::Demo, 1)).unwrap_err();
    assert!(err.to_string().contains("report"));
}

#[test]
fn config_text_drives_the_run() {
    let cfg = parse_config("# small\nM = 4\nK = 10\nL = 2\non_grid = false\n", SystemConfig::default()).unwrap();
    let s = ExperimentSpec::new(ExperimentKind::RateVsPilot, cfg).with_trials(2).with_sweep(vec![12.0]);
    let records = run_rate_vs_pilot(&s).unwrap();
    assert!(records.iter().all(|r| r.grid == "off"));
}

#[test]
fn demo_report_is_reproducible_and_consistent() {
    let mut s = spec(ExperimentKind::Demo, 1);
    s.link_symbols = 100_000;
    let report = run_demo(&s).unwrap();
    assert_eq!(report, run_demo(&s).unwrap());
    let rows: Vec<Vec<&str>> = report
        .lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>())
        .filter(|r| r.len() == 6 && (r[1] == "perfect" || r[1] == "estimated"))
        .collect();
    assert_eq!(rows.len(), 6);
    for row in rows {
        let analytic: f64 = row[2].parse().unwrap();
        let simulated: f64 = row[3].parse().unwrap();
        assert!((analytic - simulated).abs() < 0.2, "{row:?}");
    }
}

#[test]
fn single_path_demo_schemes_agree() {
    let cfg = SystemConfig { paths: 1, ..SystemConfig::default() };
    let mut s = ExperimentSpec::new(ExperimentKind::Demo, cfg).with_seed(3);
    s.link_symbols = 2_000;
    let report = run_demo(&s).unwrap();
    let analytic: Vec<&str> = report
        .lines()
        .filter(|l| l.contains(" perfect "))
        .map(|l| l.split_whitespace().nth(2).unwrap())
        .collect();
    assert_eq!(analytic.len(), 3);
    assert!(analytic.iter().all(|a| *a == analytic[0]), "{analytic:?}");
}
