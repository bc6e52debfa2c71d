use itertools::Itertools;
use nalgebra::DMatrix;

use super::PilotMatrix;
use crate::error::{Error, Result};
use crate::linalg::{least_squares, matrix_norm_sqr, GRAM_CONDITION_LIMIT};
use crate::scalar::{Cx, Real};

pub const MAX_ENUMERATED_SUBSETS: u128 = 100_000;

/// Best fixed-size tap support found by brute force.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSearch<T: Real> {
    /// Ascending tap indices.
    pub support: Vec<usize>,
    /// Residual norm of the least-squares fit on `support`.
    pub residual: T,
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Residual of projecting `rhs` onto the numerical column space of `design`,
/// for supports whose Gram matrix is too ill-conditioned to invert.
fn projection_residual<T: Real>(design: &DMatrix<Cx<T>>, rhs: &DMatrix<Cx<T>>) -> T {
    let svd = design.clone().svd(true, false);
    let u = svd.u.as_ref().expect("left singular vectors requested");
    let largest = svd.singular_values.iter().copied().fold(T::zero(), |a, b| a.max(b));
    let tol = largest * T::from_f64(GRAM_CONDITION_LIMIT.sqrt().recip()).unwrap();
    let mut residual = rhs.clone();
    for (i, &sv) in svd.singular_values.iter().enumerate() {
        if sv > tol {
            let basis = u.column(i);
            residual -= basis * (basis.adjoint() * rhs);
        }
    }
    matrix_norm_sqr(&residual).sqrt()
}

/// Tries every size-`size` set of taps and keeps the one whose least-squares
/// fit leaves the smallest residual. A support whose pilot rows are
/// (numerically) dependent is scored by projecting onto their span, so a
/// degenerate pilot such as a constant sequence still yields an answer.
pub fn exhaustive_support_oracle<T: Real>(
    y: &DMatrix<Cx<T>>,
    pilot: &PilotMatrix<T>,
    size: usize,
) -> Result<SupportSearch<T>> {
    let k = pilot.taps();
    if y.ncols() != pilot.len() {
        return Err(Error::DimensionMismatch(format!(
            "measurement has {} samples, pilot matrix has {}",
            y.ncols(),
            pilot.len()
        )));
    }
    if size > k {
        return Err(Error::InvalidConfig(format!("support size {size} exceeds {k} taps")));
    }
    let count = binomial(k, size);
    if count > MAX_ENUMERATED_SUBSETS {
        return Err(Error::TooManySubsets { count, limit: MAX_ENUMERATED_SUBSETS });
    }
    let yt = y.transpose();
    let mut best: Option<SupportSearch<T>> = None;
    for support in (0..k).combinations(size) {
        let design = pilot.matrix().select_rows(&support).transpose();
        let residual = match least_squares(&design, &yt, GRAM_CONDITION_LIMIT) {
            Ok(coef) => matrix_norm_sqr(&(&yt - &design * coef)).sqrt(),
            Err(Error::IllConditioned { .. }) => projection_residual(&design, &yt),
            Err(e) => return Err(e),
        };
        if best.as_ref().is_none_or(|b| residual < b.residual) {
            best = Some(SupportSearch { support, residual });
        }
    }
    best.ok_or(Error::IllConditioned { condition: f64::INFINITY })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 2), 15);
        assert_eq!(binomial(25, 3), 2300);
        assert_eq!(binomial(50, 25), 126_410_606_437_752);
        assert_eq!(binomial(4, 0), 1);
    }

    #[test]
    fn guard_trips() {
        let x = PilotMatrix::from_matrix(DMatrix::from_element(40, 50, Cx::new(1.0, 0.0)));
        let y = DMatrix::zeros(2, 50);
        assert!(matches!(
            exhaustive_support_oracle(&y, &x, 10),
            Err(Error::TooManySubsets { .. })
        ));
    }

    #[test]
    fn constant_pilot_is_scored_by_projection() {
        // every pair of rows is identical, so any support spans the same line
        let x = PilotMatrix::from_matrix(DMatrix::from_element(4, 5, Cx::new(1.0, 0.0)));
        let y = DMatrix::from_fn(1, 5, |_, n| Cx::new(n as f64, 0.0));
        let best = exhaustive_support_oracle(&y, &x, 2).unwrap();
        assert_eq!(best.support, vec![0, 1]);
        // distance from (0..5) to the all-ones line
        assert!((best.residual - 10.0f64.sqrt()).abs() < 1e-12);
    }
}
