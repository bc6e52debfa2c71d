use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("channel has no energy on any tap")]
    DegenerateChannel,
    #[error("tap channel is already in {0} convention")]
    WrongDirection(&'static str),
    #[error("pilot sequence covers {available} past symbols but {required} are needed")]
    PilotTooShort { required: usize, available: usize },
    #[error("ill-conditioned system (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },
    #[error("zero-forcing needs at least {taps} antennas, have {antennas}")]
    ZfInfeasible { antennas: usize, taps: usize },
    #[error("stacked channel is zero")]
    ZeroChannel,
    #[error("training and guard overhead ({overhead}) leaves no data in a {block}-sample block")]
    OverheadExceedsBlock { overhead: usize, block: usize },
    #[error("no subcarrier has a positive gain")]
    NoPositiveGain,
    #[error("support enumeration would visit {count} subsets (limit {limit})")]
    TooManySubsets { count: u128, limit: u128 },
    #[error("reference vector is zero")]
    ZeroReference,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
