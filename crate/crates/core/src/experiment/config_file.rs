//! Flat `key = value` configuration files.
//!
//! One pair per line, `#` starts a comment. Keys are the [`SystemConfig`]
//! field names; the short symbols (`M`, `K`, `L`, `Ts`, `C`, `n_c`, ...) are
//! accepted as aliases.

use crate::channel::SystemConfig;
use crate::error::{Error, Result};

fn parse<V: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<V> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("line {line}: cannot parse {key} = {value:?}")))
}

fn parse_bool(key: &str, value: &str, line: usize) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::InvalidConfig(format!("line {line}: {key} expects a boolean, got {value:?}"))),
    }
}

/// Applies the settings in `text` on top of `base` and validates the result.
pub fn parse_config(text: &str, base: SystemConfig) -> Result<SystemConfig> {
    let mut cfg = base;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::InvalidConfig(format!("line {line}: expected key = value")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "antennas" | "M" => cfg.antennas = parse(key, value, line)?,
            "taps" | "K" => cfg.taps = parse(key, value, line)?,
            "paths" | "L" => cfg.paths = parse(key, value, line)?,
            "sample_interval" | "Ts" => cfg.sample_interval = parse(key, value, line)?,
            "rolloff" | "beta" => cfg.rolloff = parse(key, value, line)?,
            "tap_threshold" | "C" => cfg.tap_threshold = parse(key, value, line)?,
            "noise_dbm" => cfg.noise_dbm = parse(key, value, line)?,
            "p_ul_dbm" => cfg.p_ul_dbm = parse(key, value, line)?,
            "p_dl_dbm" => cfg.p_dl_dbm = parse(key, value, line)?,
            "coherence_samples" | "n_c" => cfg.coherence_samples = parse(key, value, line)?,
            "guard_samples" | "n_g" => cfg.guard_samples = parse(key, value, line)?,
            "pathloss_db" => cfg.pathloss_db = parse(key, value, line)?,
            "on_grid" => cfg.on_grid = parse_bool(key, value, line)?,
            "subcarriers" | "S" => cfg.subcarriers = parse(key, value, line)?,
            "cyclic_prefix" | "N_cp" => cfg.cyclic_prefix = parse(key, value, line)?,
            _ => return Err(Error::InvalidConfig(format!("line {line}: unknown key {key:?}"))),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}
