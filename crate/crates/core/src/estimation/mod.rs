//! Uplink pilot training and greedy sparse recovery of the tap channel.
//!
//! Stacking the `N` received vectors gives `Y = H X + Z` with a Toeplitz pilot
//! matrix `X`; vectorizing gives `c = (X^T ⊗ I_M) d + b`, where each group of
//! `M` consecutive entries of `d` is one tap. Recovery works on that
//! block-sparse model without ever forming the Kronecker product.

mod exhaustive;
mod greedy;
mod operator;
mod pilot;

pub use exhaustive::{exhaustive_support_oracle, SupportSearch, MAX_ENUMERATED_SUBSETS};
pub use greedy::{bomp_estimate, omp_estimate, Epsilon, EstimationResult, GreedyOptions, Termination};
pub use operator::{unvec, vec, MeasurementOperator};
pub use pilot::{build_pilot_matrix, generate_pilot, simulate_uplink_rx, PilotMatrix, PilotSequence};

use crate::error::{Error, Result};
use crate::scalar::{abs2, Cx, Real};

/// Normalized squared error `||estimate - truth||^2 / ||truth||^2`.
pub fn nmse<T: Real>(estimate: &[Cx<T>], truth: &[Cx<T>]) -> Result<T> {
    if estimate.len() != truth.len() {
        return Err(Error::DimensionMismatch(format!(
            "estimate has {} entries, truth has {}",
            estimate.len(),
            truth.len()
        )));
    }
    let reference = truth.iter().fold(T::zero(), |acc, z| acc + abs2(*z));
    if reference == T::zero() {
        return Err(Error::ZeroReference);
    }
    let error = estimate
        .iter()
        .zip(truth)
        .fold(T::zero(), |acc, (a, b)| acc + abs2(*a - *b));
    Ok(error / reference)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn nmse_reference_cases() {
        let d = [cx(1.0, -2.0), cx(0.5, 0.0), cx(0.0, 3.0)];
        let zero = [cx(0.0, 0.0); 3];
        let doubled: Vec<_> = d.iter().map(|z| z * 2.0).collect();
        assert_eq!(nmse(&d, &d).unwrap(), 0.0);
        assert_eq!(nmse(&zero, &d).unwrap(), 1.0);
        assert!((nmse(&doubled, &d).unwrap() - 1.0f64).abs() < 1e-15);
        assert_eq!(nmse(&d, &zero), Err(Error::ZeroReference));
        assert!(nmse(&d[..2], &d).is_err());
    }
}
