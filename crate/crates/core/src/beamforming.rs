//! Delay pre-compensation and tap-based beamforming.
//!
//! The transmitter sends `x[n] = sum_l f_l s[n - kappa_l]` with one beam per
//! significant tap `k_l` and delay `kappa_l = k_max - k_l`, so that every
//! significant tap delivers the symbol `s[n - k_max]` at the receiver. The
//! remaining (tap, beam) pairs leak other symbols; grouping them by lag gives
//! the effective channels `g_Sigma[i]` that drive the SINR and the MMSE design.
//!
//! The same constructors serve perfect and estimated CSI: pass the estimated
//! downlink channel and the significant taps selected on it.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::channel::{SignificantTapSet, TapChannelMatrix};
use crate::error::{Error, Result};
use crate::linalg::{least_squares, norm, norm_sqr, stack, unstack};
use crate::scalar::{cx_real, Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Zf,
    Mrt,
    Mmse,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Zf, Scheme::Mrt, Scheme::Mmse];

    pub fn tag(self) -> &'static str {
        match self {
            Scheme::Zf => "zf",
            Scheme::Mrt => "mrt",
            Scheme::Mmse => "mmse",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Per-tap beams and delays, ordered like the significant-tap set they were
/// designed for.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerSet<T: Real> {
    pub taps: SignificantTapSet,
    pub vectors: Vec<DVector<Cx<T>>>,
    pub kappas: Vec<usize>,
    pub scheme: Scheme,
    pub power: T,
}

impl<T: Real> BeamformerSet<T> {
    /// `f_Sigma`, the beams stacked into one `M L'` vector.
    pub fn stacked(&self) -> DVector<Cx<T>> {
        stack(&self.vectors)
    }

    pub fn total_power(&self) -> T {
        self.vectors.iter().fold(T::zero(), |acc, f| acc + norm_sqr(f))
    }

    pub fn antennas(&self) -> usize {
        self.vectors.first().map_or(0, |f| f.len())
    }

    /// Same taps and delays with different beams.
    pub fn with_vectors(&self, vectors: Vec<DVector<Cx<T>>>) -> Self {
        Self { vectors, ..self.clone() }
    }
}

/// `kappa_l = k_max - k_l` in the order of `omega`.
pub fn delay_precompensation(omega: &SignificantTapSet) -> Vec<usize> {
    let k_max = omega.k_max();
    omega.indices().iter().map(|&k| k_max - k).collect()
}

fn check_taps<T: Real>(h: &TapChannelMatrix<T>, omega: &SignificantTapSet) -> Result<()> {
    if omega.k_max() >= h.num_taps() {
        return Err(Error::DimensionMismatch(format!(
            "significant tap {} outside a {}-tap channel",
            omega.k_max(),
            h.num_taps()
        )));
    }
    Ok(())
}

fn significant_vectors<T: Real>(h: &TapChannelMatrix<T>, omega: &SignificantTapSet) -> Vec<DVector<Cx<T>>> {
    let dl = h.as_downlink();
    omega.indices().iter().map(|&k| dl.tap(k)).collect()
}

fn assemble<T: Real>(
    omega: &SignificantTapSet,
    vectors: Vec<DVector<Cx<T>>>,
    scheme: Scheme,
    power: T,
) -> BeamformerSet<T> {
    BeamformerSet { kappas: delay_precompensation(omega), taps: omega.clone(), vectors, scheme, power }
}

/// Tap-based zero forcing: `f_l ∝ Q_l h[k_l]`, where `Q_l` projects onto the
/// orthogonal complement of the other significant taps, with one common
/// normalization across all beams.
///
/// The projection is computed from a QR factorization of the other taps
/// rather than `(H_l^H H_l)^{-1}`.
pub fn zf_beamformer<T: Real>(
    h: &TapChannelMatrix<T>,
    omega: &SignificantTapSet,
    power: T,
) -> Result<BeamformerSet<T>> {
    check_taps(h, omega)?;
    let taps = significant_vectors(h, omega);
    let m = h.antennas();
    if m < taps.len() {
        return Err(Error::ZfInfeasible { antennas: m, taps: taps.len() });
    }
    let mut projected = Vec::with_capacity(taps.len());
    for (l, h_l) in taps.iter().enumerate() {
        let others: Vec<DVector<Cx<T>>> =
            taps.iter().enumerate().filter(|(j, _)| *j != l).map(|(_, v)| v.clone()).collect();
        if others.is_empty() {
            projected.push(h_l.clone());
            continue;
        }
        let basis = DMatrix::from_columns(&others);
        let rhs = DMatrix::from_column_slice(m, 1, h_l.as_slice());
        // h_l minus its least-squares fit on the other taps
        let coef = least_squares(&basis, &rhs, crate::linalg::GRAM_CONDITION_LIMIT)?;
        let residual = rhs - basis * coef;
        projected.push(DVector::from_column_slice(residual.as_slice()));
    }
    let total: T = projected.iter().fold(T::zero(), |acc, v| acc + norm_sqr(v));
    let largest = taps.iter().fold(T::zero(), |acc, v| acc.max(norm_sqr(v)));
    if !(total > largest * T::eps()) {
        return Err(Error::IllConditioned { condition: f64::INFINITY });
    }
    let scale = cx_real((power / total).sqrt());
    let vectors = projected.into_iter().map(|v| v * scale).collect();
    Ok(assemble(omega, vectors, Scheme::Zf, power))
}

/// Relative singular-value cutoff of [`zf_beamformer_rank_revealing`]; the
/// square root of the Gram condition limit.
pub const ZF_RANK_TOLERANCE: f64 = 1e-6;

/// Zero forcing with `Q_l = I - H_l H_l^+`, the projector onto the orthogonal
/// complement of the *span* of the other taps.
///
/// Identical to [`zf_beamformer`] when the other taps are well conditioned.
/// When they are not (off-grid paths spread over several nearly collinear
/// taps), directions whose singular value falls below `rank_tolerance` times
/// the largest are treated as inside the span, so every beam still nulls all
/// other significant taps; beams of taps lying in that span come out zero.
/// Fails with [`Error::ZeroChannel`] when every beam vanishes.
pub fn zf_beamformer_rank_revealing<T: Real>(
    h: &TapChannelMatrix<T>,
    omega: &SignificantTapSet,
    power: T,
    rank_tolerance: T,
) -> Result<BeamformerSet<T>> {
    check_taps(h, omega)?;
    let taps = significant_vectors(h, omega);
    let mut projected = Vec::with_capacity(taps.len());
    for (l, h_l) in taps.iter().enumerate() {
        let others: Vec<DVector<Cx<T>>> =
            taps.iter().enumerate().filter(|(j, _)| *j != l).map(|(_, v)| v.clone()).collect();
        if others.is_empty() {
            projected.push(h_l.clone());
            continue;
        }
        let svd = DMatrix::from_columns(&others).svd(true, false);
        let u = svd.u.as_ref().expect("left singular vectors requested");
        let largest = svd.singular_values.iter().copied().fold(T::zero(), |a, b| a.max(b));
        let mut residual = h_l.clone();
        for (i, &sv) in svd.singular_values.iter().enumerate() {
            if sv > largest * rank_tolerance {
                let basis = u.column(i);
                let c = basis.dotc(h_l);
                residual -= basis * c;
            }
        }
        projected.push(residual);
    }
    let total: T = projected.iter().fold(T::zero(), |acc, v| acc + norm_sqr(v));
    let largest = taps.iter().fold(T::zero(), |acc, v| acc.max(norm_sqr(v)));
    if !(total > largest * T::eps()) {
        return Err(Error::ZeroChannel);
    }
    let scale = cx_real((power / total).sqrt());
    let vectors = projected.into_iter().map(|v| v * scale).collect();
    Ok(assemble(omega, vectors, Scheme::Zf, power))
}

/// Tap-based MRT: `f_l = sqrt(P) h[k_l] / ||h_Sigma||`.
pub fn mrt_beamformer<T: Real>(
    h: &TapChannelMatrix<T>,
    omega: &SignificantTapSet,
    power: T,
) -> Result<BeamformerSet<T>> {
    check_taps(h, omega)?;
    let taps = significant_vectors(h, omega);
    let stacked_norm = norm(&stack(&taps));
    if stacked_norm == T::zero() {
        return Err(Error::ZeroChannel);
    }
    let scale = cx_real(power.sqrt() / stacked_norm);
    let vectors = taps.into_iter().map(|v| v * scale).collect();
    Ok(assemble(omega, vectors, Scheme::Mrt, power))
}

/// Stacked desired channel `h_Sigma` and the lag-grouped interference
/// channels `g_Sigma[i]`, `i = ±1, ..., ±(K-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannelGroups<T: Real> {
    pub antennas: usize,
    pub h_sigma: DVector<Cx<T>>,
    /// `(i, g_Sigma[i])` for every nonzero lag, ascending in `i`.
    pub lags: Vec<(isize, DVector<Cx<T>>)>,
}

impl<T: Real> EffectiveChannelGroups<T> {
    pub fn lag(&self, i: isize) -> Option<&DVector<Cx<T>>> {
        self.lags.iter().find(|(lag, _)| *lag == i).map(|(_, g)| g)
    }

    /// Block `l` (one `M`-vector) of `g_Sigma[i]`.
    pub fn block(&self, i: isize, l: usize) -> Option<DVector<Cx<T>>> {
        self.lag(i).map(|g| g.rows(l * self.antennas, self.antennas).into_owned())
    }

    /// `sum_i g_Sigma[i] g_Sigma[i]^H`.
    pub fn interference_covariance(&self) -> DMatrix<Cx<T>> {
        let n = self.h_sigma.len();
        let mut c = DMatrix::zeros(n, n);
        for (_, g) in &self.lags {
            c.ger(Cx::new(T::one(), T::zero()), g, &g.conjugate(), Cx::new(T::one(), T::zero()));
        }
        c
    }
}

/// Block `l` of `g_Sigma[i]` is `h[k_l - i]` when that is a valid tap and
/// zero otherwise.
pub fn effective_channel_groups<T: Real>(
    h: &TapChannelMatrix<T>,
    omega: &SignificantTapSet,
) -> EffectiveChannelGroups<T> {
    let dl = h.as_downlink();
    let m = dl.antennas();
    let k = dl.num_taps() as isize;
    let taps = omega.indices();
    let h_sigma = stack(&taps.iter().map(|&t| dl.tap(t)).collect::<Vec<_>>());
    let lags = (-(k - 1)..k)
        .filter(|&i| i != 0)
        .map(|i| {
            let mut g = DVector::zeros(m * taps.len());
            for (l, &k_l) in taps.iter().enumerate() {
                let src = k_l as isize - i;
                if (0..k).contains(&src) {
                    g.rows_mut(l * m, m).copy_from(&dl.matrix().column(src as usize));
                }
            }
            (i, g)
        })
        .collect();
    EffectiveChannelGroups { antennas: m, h_sigma, lags }
}

/// MMSE (max-SINR) beams: `f_Sigma = sqrt(P) C^{-1} h_Sigma / ||C^{-1} h_Sigma||`
/// with `C = sum_i g_Sigma[i] g_Sigma[i]^H + (sigma^2 / P) I`.
pub fn mmse_beamformer<T: Real>(
    h: &TapChannelMatrix<T>,
    omega: &SignificantTapSet,
    power: T,
    noise: T,
) -> Result<BeamformerSet<T>> {
    check_taps(h, omega)?;
    if !(noise > T::zero()) || !(power > T::zero()) {
        return Err(Error::InvalidConfig("MMSE needs positive noise and power".into()));
    }
    let groups = effective_channel_groups(h, omega);
    let mut c = groups.interference_covariance();
    let loading = cx_real(noise / power);
    for d in 0..c.nrows() {
        c[(d, d)] += loading;
    }
    let chol = c.cholesky().ok_or(Error::IllConditioned { condition: f64::INFINITY })?;
    let direction = chol.solve(&groups.h_sigma);
    let dir_norm = norm(&direction);
    if dir_norm == T::zero() {
        return Err(Error::ZeroChannel);
    }
    let f = direction * cx_real(power.sqrt() / dir_norm);
    Ok(assemble(omega, unstack(&f, h.antennas()), Scheme::Mmse, power))
}

/// Dispatches to the scheme's constructor. With estimated CSI, pass the
/// estimated channel and the taps selected on it.
pub fn beamform<T: Real>(
    scheme: Scheme,
    h: &TapChannelMatrix<T>,
    omega: &SignificantTapSet,
    power: T,
    noise: T,
) -> Result<BeamformerSet<T>> {
    match scheme {
        Scheme::Zf => zf_beamformer(h, omega, power),
        Scheme::Mrt => mrt_beamformer(h, omega, power),
        Scheme::Mmse => mmse_beamformer(h, omega, power, noise),
    }
}

/// Beams for estimated CSI: significant taps are selected on `h_hat` with
/// `threshold`, then the scheme is applied to `h_hat`.
pub fn beamform_estimated<T: Real>(
    scheme: Scheme,
    h_hat: &TapChannelMatrix<T>,
    threshold: T,
    power: T,
    noise: T,
) -> Result<BeamformerSet<T>> {
    let omega_hat = crate::channel::select_significant_taps(h_hat, threshold)?;
    beamform(scheme, h_hat, &omega_hat, power, noise)
}
