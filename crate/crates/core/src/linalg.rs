//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{abs2, modulus, Cx, Real};

/// Gram matrices whose condition number exceeds this are treated as singular.
pub const GRAM_CONDITION_LIMIT: f64 = 1e12;

pub(crate) fn norm_sqr<T: Real>(v: &DVector<Cx<T>>) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + abs2(*z))
}

pub(crate) fn norm<T: Real>(v: &DVector<Cx<T>>) -> T {
    norm_sqr(v).sqrt()
}

pub(crate) fn matrix_norm_sqr<T: Real>(m: &DMatrix<Cx<T>>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc + abs2(*z))
}

/// `a^H b`.
pub(crate) fn inner<T: Real>(a: &DVector<Cx<T>>, b: &DVector<Cx<T>>) -> Cx<T> {
    a.dotc(b)
}

/// Solves `min ||design * x - rhs||_F` column by column through a thin QR
/// factorization.
///
/// The ratio of the extreme diagonal magnitudes of `R` estimates the
/// condition number of `design`; its square bounds that of the Gram matrix
/// `design^H design`, which is what gets compared against `gram_limit`.
pub(crate) fn least_squares<T: Real>(
    design: &DMatrix<Cx<T>>,
    rhs: &DMatrix<Cx<T>>,
    gram_limit: f64,
) -> Result<DMatrix<Cx<T>>> {
    let (rows, cols) = design.shape();
    if rhs.nrows() != rows {
        return Err(Error::DimensionMismatch(format!(
            "design has {rows} rows, right-hand side has {}",
            rhs.nrows()
        )));
    }
    if cols == 0 {
        return Ok(DMatrix::zeros(0, rhs.ncols()));
    }
    if cols > rows {
        return Err(Error::IllConditioned { condition: f64::INFINITY });
    }
    let qr = design.clone().qr();
    let r = qr.r();
    let diag: Vec<T> = (0..cols).map(|i| modulus(r[(i, i)])).collect();
    let largest = diag.iter().copied().fold(T::zero(), |a, b| a.max(b));
    let smallest = diag.iter().copied().fold(T::max_value().unwrap(), |a, b| a.min(b));
    let gram_condition = if smallest > T::zero() {
        let c = (largest / smallest).as_f64();
        c * c
    } else {
        f64::INFINITY
    };
    if !(gram_condition <= gram_limit) {
        return Err(Error::IllConditioned { condition: gram_condition });
    }
    let projected = qr.q().adjoint() * rhs;
    r.solve_upper_triangular(&projected)
        .ok_or(Error::IllConditioned { condition: f64::INFINITY })
}

/// Phase-invariant angle between two complex directions, in radians.
///
/// Computed from the component of `b` orthogonal to `a` so that angles far
/// below `sqrt(eps)` stay resolvable.
pub fn direction_angle<T: Real>(a: &DVector<Cx<T>>, b: &DVector<Cx<T>>) -> T {
    let na2 = norm_sqr(a);
    let nb = norm(b);
    if na2 == T::zero() || nb == T::zero() {
        return T::frac_pi_2();
    }
    let along = inner(a, b);
    let orth = b - a * (along / Cx::new(na2, T::zero()));
    norm(&orth).atan2(modulus(along))
}

/// Stacks per-tap vectors into one long column.
pub(crate) fn stack<T: Real>(blocks: &[DVector<Cx<T>>]) -> DVector<Cx<T>> {
    let len = blocks.iter().map(|b| b.len()).sum();
    let mut out = DVector::zeros(len);
    let mut at = 0;
    for b in blocks {
        out.rows_mut(at, b.len()).copy_from(b);
        at += b.len();
    }
    out
}

pub(crate) fn unstack<T: Real>(v: &DVector<Cx<T>>, block: usize) -> Vec<DVector<Cx<T>>> {
    (0..v.len() / block)
        .map(|l| v.rows(l * block, block).into_owned())
        .collect()
}
