use nalgebra::{DMatrix, DVector};

use super::PilotMatrix;
use crate::error::{Error, Result};
use crate::scalar::{abs2, Cx, Real};

/// Column-major vectorization.
pub fn vec<T: Real>(m: &DMatrix<Cx<T>>) -> DVector<Cx<T>> {
    DVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vec`] for an `rows x cols` matrix.
pub fn unvec<T: Real>(v: &DVector<Cx<T>>, rows: usize, cols: usize) -> DMatrix<Cx<T>> {
    DMatrix::from_column_slice(rows, cols, v.as_slice())
}

/// The dictionary `A = X^T ⊗ I_M` (shape `MN x MK`) kept in factored form.
///
/// Block `k` of `A` is `X[k, :]^T ⊗ I_M`: its `M` columns all have norm
/// `||X[k, :]||` and are mutually orthogonal, so block correlations with a
/// residual `r = vec(R)` reduce to the columns of `R X^H`.
#[derive(Debug, Clone, Copy)]
pub struct MeasurementOperator<'a, T: Real> {
    pilot: &'a PilotMatrix<T>,
    antennas: usize,
}

impl<'a, T: Real> MeasurementOperator<'a, T> {
    pub fn new(pilot: &'a PilotMatrix<T>, antennas: usize) -> Self {
        Self { pilot, antennas }
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn taps(&self) -> usize {
        self.pilot.taps()
    }

    /// `(rows, cols) = (M N, M K)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.antennas * self.pilot.len(), self.antennas * self.pilot.taps())
    }

    fn check(&self, got: usize, want: usize) -> Result<()> {
        if got == want {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!("vector has {got} entries, operator expects {want}")))
        }
    }

    /// `A d`, computed as `vec(H X)`.
    pub fn apply(&self, d: &DVector<Cx<T>>) -> Result<DVector<Cx<T>>> {
        self.check(d.len(), self.shape().1)?;
        let h = unvec(d, self.antennas, self.taps());
        Ok(vec(&(h * self.pilot.matrix())))
    }

    /// `A^H r`, computed as `vec(R X^H)`.
    pub fn adjoint(&self, r: &DVector<Cx<T>>) -> Result<DVector<Cx<T>>> {
        self.check(r.len(), self.shape().0)?;
        let residual = unvec(r, self.antennas, self.pilot.len());
        Ok(vec(&self.correlate(&residual)))
    }

    /// `R X^H` for a residual already shaped as `M x N`; column `k` is
    /// `A_k^H r`.
    pub fn correlate(&self, residual: &DMatrix<Cx<T>>) -> DMatrix<Cx<T>> {
        residual * self.pilot.matrix().adjoint()
    }

    /// Norm shared by the columns of block `k`.
    pub fn block_column_norms(&self) -> Vec<T> {
        self.pilot.row_norms()
    }

    /// `|| normalized(A_k)^H r ||` for every block.
    pub fn normalized_block_correlations(&self, residual: &DMatrix<Cx<T>>) -> Vec<T> {
        let corr = self.correlate(residual);
        corr.column_iter()
            .zip(self.block_column_norms())
            .map(|(col, norm)| {
                if norm > T::zero() {
                    col.iter().fold(T::zero(), |acc, z| acc + abs2(*z)).sqrt() / norm
                } else {
                    T::zero()
                }
            })
            .collect()
    }

    /// Dense `MN x M` block `A_k`.
    pub fn block(&self, k: usize) -> DMatrix<Cx<T>> {
        let m = self.antennas;
        let n = self.pilot.len();
        let row = self.pilot.matrix().row(k);
        DMatrix::from_fn(m * n, m, |r, c| if r % m == c { row[r / m] } else { Cx::new(T::zero(), T::zero()) })
    }

    /// Materializes the full dictionary; only sensible for small instances.
    pub fn to_dense(&self) -> DMatrix<Cx<T>> {
        let (rows, cols) = self.shape();
        let mut a = DMatrix::zeros(rows, cols);
        for k in 0..self.taps() {
            a.columns_mut(k * self.antennas, self.antennas).copy_from(&self.block(k));
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{complex_gaussian, stream, Purpose};

    #[test]
    fn blocks_have_uniform_column_norms() {
        let mut rng = stream(8, 0, Purpose::Other(1));
        let x = PilotMatrix::from_matrix(DMatrix::from_fn(3, 4, |_, _| complex_gaussian(&mut rng, 1.0)));
        let op = MeasurementOperator::new(&x, 2);
        let norms: Vec<f64> = op.block_column_norms();
        for k in 0..3 {
            let b = op.block(k);
            for c in 0..2 {
                assert!((b.column(c).norm() - norms[k]).abs() < 1e-12);
            }
            // columns inside a block are orthogonal
            assert!(b.column(0).dotc(&b.column(1)).norm() < 1e-15);
        }
    }

    #[test]
    fn wrong_lengths_rejected() {
        let x = PilotMatrix::from_matrix(DMatrix::from_element(2, 3, Cx::new(1.0, 0.0)));
        let op = MeasurementOperator::new(&x, 2);
        assert!(op.apply(&DVector::zeros(5)).is_err());
        assert!(op.adjoint(&DVector::zeros(4)).is_err());
    }
}
