use crate::scalar::Real;

/// Raised-cosine pulse `p(t)` with symbol period `ts` and roll-off `beta`,
/// normalized to `p(0) = 1`.
///
/// At `|t| = ts / (2 beta)` the closed form is 0/0; the analytic limit
/// `(pi/4) sinc(1 / (2 beta))` is returned there.
pub fn raised_cosine<T: Real>(t: T, ts: T, beta: T) -> T {
    raised_cosine_normalized(t / ts, beta)
}

/// Raised-cosine pulse evaluated at `x = t / ts`.
pub fn raised_cosine_normalized<T: Real>(x: T, beta: T) -> T {
    let two_bx = (beta + beta) * x;
    let denom = T::one() - two_bx * two_bx;
    if denom.abs() <= T::lit(1e-9) {
        return T::frac_pi_4() * sinc(T::one() / (beta + beta));
    }
    sinc(x) * (T::pi() * beta * x).cos() / denom
}

/// Normalized sinc, `sin(pi x) / (pi x)`.
pub fn sinc<T: Real>(x: T) -> T {
    if x == T::zero() {
        return T::one();
    }
    let px = T::pi() * x;
    px.sin() / px
}

#[cfg(test)]
mod tests {
    use super::*;

    const TS: f64 = 10e-9;

    #[test]
    fn peak_is_one() {
        assert_eq!(raised_cosine::<f64>(0.0, TS, 0.5), 1.0);
    }

    #[test]
    fn nyquist_zeros() {
        for beta in [0.0, 0.25, 0.5, 1.0] {
            for k in [-3i32, -2, -1, 1, 2, 3, 7, 24] {
                let v: f64 = raised_cosine(f64::from(k) * TS, TS, beta);
                assert!(v.abs() < 1e-12, "beta={beta} k={k} p={v}");
            }
        }
    }

    #[test]
    fn half_sample_value_matches_extended_precision() {
        // 40-digit evaluation of the closed form at t = Ts/2, beta = 0.5
        let expected = 0.600_210_877_438_070_713;
        assert!((raised_cosine::<f64>(5e-9, TS, 0.5) - expected).abs() < 1e-14);
        assert!((raised_cosine_normalized(0.3f64, 0.25) - 0.853_888_701_086_900_5).abs() < 1e-14);
        assert!((raised_cosine_normalized(1.7f64, 1.0) - 0.008_431_670_327_993_059).abs() < 1e-14);
    }

    #[test]
    fn removable_singularity_uses_limit() {
        assert!((raised_cosine_normalized(0.5f64, 1.0) - 0.5).abs() < 1e-15);
        let x: f64 = 1.0 / 0.6;
        let v = raised_cosine_normalized(x, 0.3);
        assert!((v - (-0.129_903_810_567_665_797)).abs() < 1e-12);
        // continuity across the singular point
        let near = raised_cosine_normalized(x + 1e-6, 0.3);
        assert!((near - v).abs() < 1e-5);
    }

    #[test]
    fn symmetric_in_time() {
        for x in [0.1, 0.77, 1.5, 2.25] {
            assert_eq!(raised_cosine_normalized::<f64>(x, 0.5), raised_cosine_normalized(-x, 0.5));
        }
    }

    #[test]
    fn single_precision_agrees() {
        let v32 = raised_cosine_normalized(0.5f32, 0.5);
        assert!((f64::from(v32) - 0.600_210_877_438_070_7).abs() < 1e-6);
    }
}
