//! Link-level evaluation: analytic SINR for perfect and estimated CSI, a
//! time-domain simulator that checks those expressions, achievable rates,
//! and the OFDM baseline.

mod ofdm;
mod rate;
mod simulate;
mod sinr;

pub use ofdm::{
    equispaced_pilot_indices, generate_ofdm_pilot, ofdm_channel_estimate, ofdm_rate,
    ofdm_subcarrier_channels, water_filling, OfdmParams, OfdmPilot,
};
pub use rate::{achievable_rate, RateReport};
pub use simulate::{simulate_link, SimulatedLink};
pub use sinr::{delay_group_map, sinr_estimated, sinr_perfect, DelayGroupMap, LockedSinr};
