//! Sparse multipath channels: path generation, pulse-shaped tap synthesis,
//! uplink/downlink reciprocity and significant-tap selection.

mod config;
mod paths;
mod pulse;
mod taps;

pub use config::{dbm_to_watts, SystemConfig};
pub use paths::{generate_paths, Path, PathSet};
pub use pulse::{raised_cosine, raised_cosine_normalized, sinc};
pub use taps::{
    select_significant_taps, synthesize_taps, uplink_channel, Direction, SignificantTapSet,
    TapChannelMatrix,
};
