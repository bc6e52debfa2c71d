//! Delay alignment modulation (DAM) link simulation.
//!
//! The crate covers the whole chain for a multi-antenna base station serving
//! a single-antenna user over a sparse multipath channel:
//!
//! * [`channel`]: path generation, raised-cosine tap synthesis, reciprocity
//!   and significant-tap selection;
//! * [`estimation`]: uplink pilot training and block/atom-wise greedy sparse
//!   recovery over a matrix-free Kronecker dictionary;
//! * [`beamforming`]: delay pre-compensation with tap-based ZF, MRT and MMSE
//!   beamformers;
//! * [`link`]: SINR and rate evaluation, a time-domain link simulator and the
//!   OFDM water-filling baseline;
//! * [`experiment`]: seeded Monte Carlo sweeps persisted as CSV.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix it to `f64`, which is what the experiments use.

pub mod beamforming;
pub mod channel;
pub mod error;
pub mod estimation;
pub mod experiment;
pub mod link;
pub mod linalg;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Cx, Real};

pub type Complex64 = Cx<f64>;
pub type PathSet64 = channel::PathSet<f64>;
pub type TapChannel = channel::TapChannelMatrix<f64>;
pub type PilotSequence64 = estimation::PilotSequence<f64>;
pub type PilotMatrix64 = estimation::PilotMatrix<f64>;
pub type Estimate = estimation::EstimationResult<f64>;
pub type Beamformers = beamforming::BeamformerSet<f64>;
pub type RateReport64 = link::RateReport<f64>;
