use crate::error::{Error, Result};

/// Converts a power level in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Physical and framing parameters shared by every experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Base-station antennas, `M`.
    pub antennas: usize,
    /// Delay taps, `K`.
    pub taps: usize,
    /// Physical propagation paths, `L`.
    pub paths: usize,
    /// Sampling interval in seconds.
    pub sample_interval: f64,
    /// Raised-cosine roll-off in `[0, 1]`.
    pub rolloff: f64,
    /// Relative power threshold for significant taps, in `(0, 1)`.
    pub tap_threshold: f64,
    pub noise_dbm: f64,
    pub p_ul_dbm: f64,
    pub p_dl_dbm: f64,
    /// Samples per coherence block, `n_c`.
    pub coherence_samples: usize,
    /// Guard interval per block, `n_g`.
    pub guard_samples: usize,
    /// Large-scale loss applied to every path.
    pub pathloss_db: f64,
    /// Force path delays onto integer multiples of the sampling interval
    /// (default). The NMSE sweep runs both grids regardless.
    pub on_grid: bool,
    /// OFDM baseline: number of subcarriers.
    pub subcarriers: usize,
    /// OFDM baseline: cyclic prefix length.
    pub cyclic_prefix: usize,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            antennas: 16,
            taps: 25,
            paths: 3,
            sample_interval: 10e-9,
            rolloff: 0.5,
            tap_threshold: 0.01,
            noise_dbm: -94.0,
            p_ul_dbm: 26.0,
            p_dl_dbm: 30.0,
            coherence_samples: 100_000,
            guard_samples: 100,
            pathloss_db: 110.0,
            on_grid: true,
            subcarriers: 512,
            cyclic_prefix: 50,
        }
    }
}

impl SystemConfig {
    /// Full-size setting: 64 antennas, 50 taps, 5 paths.
    pub fn paper_scale() -> Self {
        Self { antennas: 64, taps: 50, paths: 5, ..Self::default() }
    }

    pub fn noise_power(&self) -> f64 {
        dbm_to_watts(self.noise_dbm)
    }

    pub fn uplink_power(&self) -> f64 {
        dbm_to_watts(self.p_ul_dbm)
    }

    pub fn downlink_power(&self) -> f64 {
        dbm_to_watts(self.p_dl_dbm)
    }

    /// Average power of each path's per-antenna gain.
    pub fn path_gain_variance(&self) -> f64 {
        10f64.powf(-self.pathloss_db / 10.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.antennas == 0 || self.taps == 0 || self.paths == 0 {
            return bad("antennas, taps and paths must be positive".into());
        }
        if self.paths > self.taps {
            return bad(format!("{} paths cannot fit in {} taps", self.paths, self.taps));
        }
        if !(self.sample_interval > 0.0) {
            return bad("sample_interval must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.rolloff) {
            return bad(format!("rolloff {} outside [0, 1]", self.rolloff));
        }
        if !(self.tap_threshold > 0.0 && self.tap_threshold < 1.0) {
            return bad(format!("tap_threshold {} outside (0, 1)", self.tap_threshold));
        }
        for (name, dbm) in [
            ("noise_dbm", self.noise_dbm),
            ("p_ul_dbm", self.p_ul_dbm),
            ("p_dl_dbm", self.p_dl_dbm),
            ("pathloss_db", self.pathloss_db),
        ] {
            let lin = dbm_to_watts(dbm);
            if !dbm.is_finite() || !(lin > 0.0) || !lin.is_finite() {
                return bad(format!("{name} = {dbm} does not give a positive finite power"));
            }
        }
        if self.guard_samples >= self.coherence_samples {
            return bad("guard interval must be shorter than the coherence block".into());
        }
        if self.subcarriers < self.taps {
            return bad("OFDM needs at least as many subcarriers as channel taps".into());
        }
        Ok(())
    }

    /// Checks that a pilot of length `pilot_len` still leaves data samples.
    pub fn validate_pilot(&self, pilot_len: usize) -> Result<()> {
        if pilot_len == 0 {
            return Err(Error::InvalidConfig("pilot length must be positive".into()));
        }
        if self.guard_samples + pilot_len >= self.coherence_samples {
            return Err(Error::InvalidConfig(format!(
                "guard {} + pilot {} must be below the block length {}",
                self.guard_samples, pilot_len, self.coherence_samples
            )));
        }
        Ok(())
    }
}
