use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use damsim::channel::SystemConfig;
use damsim::experiment::{parse_config, run_demo, run_experiment, write_csv, ExperimentKind, ExperimentSpec};

/// Monte Carlo experiments for delay alignment modulation links.
#[derive(Debug, Parser)]
#[command(name = "damsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// key = value file applied on top of the defaults
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Monte Carlo trials per sweep point (default 200, 1000 with --paper-scale)
    #[arg(long, global = true, value_name = "N")]
    trials: Option<usize>,

    /// Output file; defaults to `<experiment>.csv` for sweeps and stdout for the demo
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Start from M=64, K=50, L=5 instead of the desk-scale defaults
    #[arg(long, global = true)]
    paper_scale: bool,

    /// Comma-separated sweep values (pilot lengths, or P_DL in dBm for rate-vs-power)
    #[arg(long, global = true, value_delimiter = ',', value_name = "X,..")]
    sweep: Option<Vec<f64>>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// NMSE of block and atom-wise OMP versus pilot length
    NmseSweep,
    /// DAM and OFDM rates versus pilot length
    RateVsPilot,
    /// DAM rates versus downlink power for two pilot lengths
    RateVsPower {
        /// Pilot lengths to compare
        #[arg(long, value_delimiter = ',', default_value = "15,30")]
        pilots: Vec<usize>,
    },
    /// Single end-to-end run with a text report
    Demo {
        /// Symbols pushed through the simulated link
        #[arg(long, default_value_t = 100_000)]
        symbols: usize,
    },
}

fn build_spec(cli: &Cli) -> Result<ExperimentSpec> {
    let kind = match cli.command {
        Command::NmseSweep => ExperimentKind::NmseVsPilot,
        Command::RateVsPilot => ExperimentKind::RateVsPilot,
        Command::RateVsPower { .. } => ExperimentKind::RateVsPower,
        Command::Demo { .. } => ExperimentKind::Demo,
    };
    let base = if cli.paper_scale { SystemConfig::paper_scale() } else { SystemConfig::default() };
    let config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_config(&text, base).with_context(|| format!("in {}", path.display()))?
        }
        None => base,
    };
    let mut spec = ExperimentSpec::new(kind, config).with_seed(cli.seed);
    spec.trials = cli.trials.unwrap_or(if cli.paper_scale { 1000 } else { 200 });
    if let Some(sweep) = &cli.sweep {
        spec.sweep = sweep.clone();
    }
    spec.output = cli.out.clone();
    match &cli.command {
        Command::RateVsPower { pilots } => spec.pilot_lengths = pilots.clone(),
        Command::Demo { symbols } => spec.link_symbols = *symbols,
        _ => {}
    }
    spec.validate()?;
    Ok(spec)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let spec = build_spec(&cli)?;
    if spec.kind == ExperimentKind::Demo {
        let report = run_demo(&spec)?;
        match &spec.output {
            Some(path) => fs::write(path, report).with_context(|| format!("writing {}", path.display()))?,
            None => io::stdout().write_all(report.as_bytes())?,
        }
        return Ok(());
    }
    let records = run_experiment(&spec)?;
    let path = spec.output.clone().unwrap_or_else(|| PathBuf::from(format!("{}.csv", spec.kind.tag())));
    let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    let mut writer = io::BufWriter::new(file);
    write_csv(&records, &mut writer)?;
    writer.flush()?;
    eprintln!("wrote {} rows to {}", records.len(), path.display());
    Ok(())
}
