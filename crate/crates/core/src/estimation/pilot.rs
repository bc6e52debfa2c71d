use nalgebra::DMatrix;
use rand::Rng;

use crate::channel::{Direction, TapChannelMatrix};
use crate::error::{Error, Result};
use crate::rng::complex_gaussian;
use crate::scalar::{cx_real, Cx, Real};

/// Pilot symbols `x[n]` for `n = -past, ..., len - 1`.
///
/// The `past` symbols preceding the pilot proper are the tail of earlier data
/// that the channel memory still spreads into the training window; they are
/// known at the receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotSequence<T: Real> {
    symbols: Vec<Cx<T>>,
    past: usize,
}

impl<T: Real> PilotSequence<T> {
    /// `symbols[0]` is `x[-past]`.
    pub fn new(symbols: Vec<Cx<T>>, past: usize) -> Result<Self> {
        if symbols.len() <= past {
            return Err(Error::InvalidConfig("pilot needs at least one symbol at n >= 0".into()));
        }
        Ok(Self { symbols, past })
    }

    /// Pilot length `N` (symbols at `n >= 0`).
    pub fn len(&self) -> usize {
        self.symbols.len() - self.past
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn past(&self) -> usize {
        self.past
    }

    pub fn symbols(&self) -> &[Cx<T>] {
        &self.symbols
    }

    /// `x[n]`; panics outside `-past..len`.
    pub fn at(&self, n: isize) -> Cx<T> {
        self.symbols[(n + self.past as isize) as usize]
    }
}

/// `N + K - 1` equiprobable BPSK symbols covering `x[-(K-1)] .. x[N-1]`.
pub fn generate_pilot<T: Real, R: Rng + ?Sized>(
    len: usize,
    taps: usize,
    rng: &mut R,
) -> PilotSequence<T> {
    assert!(len >= 1 && taps >= 1, "pilot length and tap count must be positive");
    let symbols = (0..len + taps - 1)
        .map(|_| cx_real(if rng.random::<bool>() { T::one() } else { -T::one() }))
        .collect();
    PilotSequence { symbols, past: taps - 1 }
}

/// `K x N` training matrix; row `k` carries the pilot delayed by `k` samples.
///
/// The time-domain matrix is Toeplitz, `X[k][n] = sqrt(P_UL) x[n - k]`; any
/// other `K x N` matrix (for instance the partial DFT used for OFDM pilots)
/// can be wrapped with [`PilotMatrix::from_matrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct PilotMatrix<T: Real> {
    x: DMatrix<Cx<T>>,
}

impl<T: Real> PilotMatrix<T> {
    pub fn from_matrix(x: DMatrix<Cx<T>>) -> Self {
        Self { x }
    }

    pub fn taps(&self) -> usize {
        self.x.nrows()
    }

    /// Number of training samples `N`.
    pub fn len(&self) -> usize {
        self.x.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.x.ncols() == 0
    }

    pub fn matrix(&self) -> &DMatrix<Cx<T>> {
        &self.x
    }

    /// Euclidean norm of each row, i.e. the norm shared by all `M` columns
    /// of the corresponding dictionary block.
    pub fn row_norms(&self) -> Vec<T> {
        self.x
            .row_iter()
            .map(|r| r.iter().fold(T::zero(), |acc, z| acc + crate::scalar::abs2(*z)).sqrt())
            .collect()
    }
}

pub fn build_pilot_matrix<T: Real>(
    pilot: &PilotSequence<T>,
    taps: usize,
    p_ul: T,
) -> Result<PilotMatrix<T>> {
    if taps == 0 {
        return Err(Error::InvalidConfig("tap count must be positive".into()));
    }
    if taps - 1 > pilot.past {
        return Err(Error::PilotTooShort { required: taps - 1, available: pilot.past });
    }
    let amp = p_ul.sqrt();
    let x = DMatrix::from_fn(taps, pilot.len(), |k, n| pilot.at(n as isize - k as isize) * amp);
    Ok(PilotMatrix { x })
}

/// `Y = H X + Z` with `Z` i.i.d. `CN(0, noise)`.
pub fn simulate_uplink_rx<T: Real, R: Rng + ?Sized>(
    uplink: &TapChannelMatrix<T>,
    pilot: &PilotMatrix<T>,
    noise: f64,
    rng: &mut R,
) -> Result<DMatrix<Cx<T>>> {
    if uplink.direction() != Direction::Uplink {
        return Err(Error::WrongDirection("downlink"));
    }
    if uplink.num_taps() != pilot.taps() {
        return Err(Error::DimensionMismatch(format!(
            "channel has {} taps, pilot matrix has {} rows",
            uplink.num_taps(),
            pilot.taps()
        )));
    }
    let mut y = uplink.matrix() * pilot.matrix();
    if noise > 0.0 {
        y.iter_mut().for_each(|v| *v += complex_gaussian::<T, _>(rng, noise));
    }
    Ok(y)
}
