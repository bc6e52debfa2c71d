//! Block OMP and plain OMP over the factored Kronecker dictionary.

use nalgebra::DMatrix;

use super::{vec, MeasurementOperator, PilotMatrix};
use crate::channel::TapChannelMatrix;
use crate::error::{Error, Result};
use crate::linalg::{least_squares, matrix_norm_sqr, GRAM_CONDITION_LIMIT};
use crate::scalar::{Cx, Real};

/// Stopping threshold on the per-iteration decrease of the residual norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Epsilon<T> {
    /// Fraction of the measurement norm `||c||`.
    Relative(T),
    Absolute(T),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreedyOptions<T> {
    pub epsilon: Epsilon<T>,
    /// Upper bound on selected blocks (BOMP) or atoms (OMP).
    pub max_selections: usize,
}

impl<T: Real> GreedyOptions<T> {
    /// Relative threshold `1e-3 ||c||` with the given selection cap.
    pub fn new(max_selections: usize) -> Self {
        Self { epsilon: Epsilon::Relative(T::lit(1e-3)), max_selections }
    }

    pub fn with_epsilon(mut self, epsilon: Epsilon<T>) -> Self {
        self.epsilon = epsilon;
        self
    }

    fn threshold(&self, measurement_norm: T) -> T {
        match self.epsilon {
            Epsilon::Relative(f) => f * measurement_norm,
            Epsilon::Absolute(e) => e,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// The best remaining candidate improved the residual norm by at most
    /// epsilon (or could not improve it at all).
    Stalled,
    /// `max_selections` reached before the residual stalled.
    CapReached,
    /// Every candidate that can be added without exceeding the number of
    /// measurements has been selected.
    Exhausted,
}

/// Output of a greedy recovery.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationResult<T: Real> {
    /// Selected indices in selection order: tap indices for BOMP, dictionary
    /// column indices `k * M + m` for OMP.
    pub support: Vec<usize>,
    /// Estimated uplink channel `M x K`, zero outside the support.
    pub channel: DMatrix<Cx<T>>,
    /// `||r_0|| = ||c||` followed by the residual norm after each accepted
    /// selection.
    pub residual_norms: Vec<T>,
    pub iterations: usize,
    pub termination: Termination,
}

impl<T: Real> EstimationResult<T> {
    /// Stacked estimate `vec(H_hat)`.
    pub fn d_hat(&self) -> nalgebra::DVector<Cx<T>> {
        vec(&self.channel)
    }

    pub fn final_residual(&self) -> T {
        *self.residual_norms.last().expect("at least the initial residual")
    }

    pub fn uplink(&self) -> TapChannelMatrix<T> {
        TapChannelMatrix::uplink(self.channel.clone())
    }

    /// Support as `(tap, antenna)` pairs when it holds OMP column indices.
    pub fn atoms(&self) -> Vec<(usize, usize)> {
        let m = self.channel.nrows();
        self.support.iter().map(|&j| (j / m, j % m)).collect()
    }

    /// Distinct taps touched by the support, ascending.
    pub fn taps_from_atoms(&self) -> Vec<usize> {
        let mut taps: Vec<usize> = self.atoms().into_iter().map(|(k, _)| k).collect();
        taps.sort_unstable();
        taps.dedup();
        taps
    }
}

fn check_dims<T: Real>(y: &DMatrix<Cx<T>>, pilot: &PilotMatrix<T>) -> Result<()> {
    if y.ncols() != pilot.len() {
        return Err(Error::DimensionMismatch(format!(
            "measurement has {} samples, pilot matrix has {}",
            y.ncols(),
            pilot.len()
        )));
    }
    if pilot.taps() == 0 || y.nrows() == 0 {
        return Err(Error::DimensionMismatch("empty dictionary".into()));
    }
    Ok(())
}

/// A correlation this small means the residual is orthogonal to every
/// remaining candidate up to rounding, so adding one cannot lower the residual.
fn negligible<T: Real>(score: T, measurement_norm: T) -> bool {
    score <= T::eps() * T::lit(1e4) * measurement_norm
}

fn argmax_unselected<T: Real>(scores: &[T], selected: &[bool]) -> Option<(usize, T)> {
    let mut best: Option<(usize, T)> = None;
    for (i, &s) in scores.iter().enumerate() {
        if selected[i] {
            continue;
        }
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best
}

/// Least-squares fit of `y` (`M x N`) onto pilot rows `rows`; returns the
/// `M x |rows|` coefficients and the residual `y - coef X_rows`.
fn project<T: Real>(
    y: &DMatrix<Cx<T>>,
    x: &DMatrix<Cx<T>>,
    rows: &[usize],
) -> Result<(DMatrix<Cx<T>>, DMatrix<Cx<T>>)> {
    let x_sel = x.select_rows(rows);
    let design = x_sel.transpose();
    let coef_t = least_squares(&design, &y.transpose(), GRAM_CONDITION_LIMIT)?;
    let coef = coef_t.transpose();
    let residual = y - &coef * x_sel;
    Ok((coef, residual))
}

/// Block orthogonal matching pursuit.
///
/// Each iteration picks the tap whose normalized dictionary block correlates
/// most with the residual, refits all selected blocks by least squares on the
/// unnormalized dictionary, and keeps the new block only if the residual norm
/// dropped by more than epsilon. Selection is capped by `max_selections`, by
/// `K`, and by `N` (beyond which the Gram matrix is singular).
pub fn bomp_estimate<T: Real>(
    y: &DMatrix<Cx<T>>,
    pilot: &PilotMatrix<T>,
    options: &GreedyOptions<T>,
) -> Result<EstimationResult<T>> {
    check_dims(y, pilot)?;
    let (m, k) = (y.nrows(), pilot.taps());
    let op = MeasurementOperator::new(pilot, m);
    let c_norm = matrix_norm_sqr(y).sqrt();
    let eps = options.threshold(c_norm);
    let cap = options.max_selections.min(k).min(pilot.len());

    let mut residual = y.clone();
    let mut residual_norms = vec![c_norm];
    let mut support: Vec<usize> = Vec::new();
    let mut selected = vec![false; k];
    let mut coef = DMatrix::zeros(m, 0);

    let termination = loop {
        if support.len() >= cap {
            break if cap < options.max_selections { Termination::Exhausted } else { Termination::CapReached };
        }
        let scores = op.normalized_block_correlations(&residual);
        let Some((best, score)) = argmax_unselected(&scores, &selected) else {
            break Termination::Exhausted;
        };
        if negligible(score, c_norm) {
            break Termination::Stalled;
        }
        let mut trial = support.clone();
        trial.push(best);
        let (trial_coef, trial_residual) = project(y, pilot.matrix(), &trial)?;
        let trial_norm = matrix_norm_sqr(&trial_residual).sqrt();
        let previous = *residual_norms.last().unwrap();
        if !(previous - trial_norm > eps) {
            break Termination::Stalled;
        }
        selected[best] = true;
        support = trial;
        coef = trial_coef;
        residual = trial_residual;
        residual_norms.push(trial_norm);
    };

    let mut channel = DMatrix::zeros(m, k);
    for (j, &tap) in support.iter().enumerate() {
        channel.set_column(tap, &coef.column(j));
    }
    Ok(EstimationResult {
        iterations: support.len(),
        support,
        channel,
        residual_norms,
        termination,
    })
}

/// Atom-wise orthogonal matching pursuit on the same dictionary.
///
/// Atoms are single columns `(tap k, antenna m)`. Because `A = X^T ⊗ I_M`,
/// atoms of different antennas never overlap, so the least-squares refit
/// after adding atom `(k, m)` only touches antenna `m`.
pub fn omp_estimate<T: Real>(
    y: &DMatrix<Cx<T>>,
    pilot: &PilotMatrix<T>,
    options: &GreedyOptions<T>,
) -> Result<EstimationResult<T>> {
    check_dims(y, pilot)?;
    let (m, k, n) = (y.nrows(), pilot.taps(), pilot.len());
    let op = MeasurementOperator::new(pilot, m);
    let col_norms = op.block_column_norms();
    let c_norm = matrix_norm_sqr(y).sqrt();
    let eps = options.threshold(c_norm);
    let cap = options.max_selections.min(m * k).min(m * n);

    let mut residual = y.clone();
    let mut residual_norms = vec![c_norm];
    let mut support: Vec<usize> = Vec::new();
    let mut selected = vec![false; m * k];
    let mut per_antenna: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut per_antenna_coef: Vec<DMatrix<Cx<T>>> = vec![DMatrix::zeros(1, 0); m];

    let termination = loop {
        if support.len() >= cap {
            break if cap < options.max_selections { Termination::Exhausted } else { Termination::CapReached };
        }
        let corr = op.correlate(&residual);
        // column-major over (antenna, tap) matches the dictionary column order
        let scores: Vec<T> = (0..m * k)
            .map(|j| {
                let (tap, ant) = (j / m, j % m);
                if col_norms[tap] > T::zero() && per_antenna[ant].len() < n {
                    crate::scalar::modulus(corr[(ant, tap)]) / col_norms[tap]
                } else {
                    T::zero()
                }
            })
            .collect();
        let Some((best, score)) = argmax_unselected(&scores, &selected) else {
            break Termination::Exhausted;
        };
        if negligible(score, c_norm) {
            break Termination::Stalled;
        }
        let (tap, ant) = (best / m, best % m);
        let mut rows = per_antenna[ant].clone();
        rows.push(tap);
        let y_row = y.rows(ant, 1).into_owned();
        let (coef, res_row) = project(&y_row, pilot.matrix(), &rows)?;
        let mut trial_residual = residual.clone();
        trial_residual.set_row(ant, &res_row.row(0));
        let trial_norm = matrix_norm_sqr(&trial_residual).sqrt();
        let previous = *residual_norms.last().unwrap();
        if !(previous - trial_norm > eps) {
            break Termination::Stalled;
        }
        selected[best] = true;
        support.push(best);
        per_antenna[ant] = rows;
        per_antenna_coef[ant] = coef;
        residual = trial_residual;
        residual_norms.push(trial_norm);
    };

    let mut channel = DMatrix::zeros(m, k);
    for (ant, taps) in per_antenna.iter().enumerate() {
        for (j, &tap) in taps.iter().enumerate() {
            channel[(ant, tap)] = per_antenna_coef[ant][(0, j)];
        }
    }
    Ok(EstimationResult {
        iterations: support.len(),
        support,
        channel,
        residual_norms,
        termination,
    })
}
