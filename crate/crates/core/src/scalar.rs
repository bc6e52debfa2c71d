//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::{Complex, RealField};
use num_traits::{FloatConst, ToPrimitive};

/// Real floating point type the simulation is generic over (`f32` or `f64`).
///
/// `RealField` supplies the transcendental functions and lets `Complex<Self>`
/// act as an nalgebra scalar, so complex QR and Cholesky work out of the box.
pub trait Real:
    RealField + Copy + FloatConst + ToPrimitive + Debug + Display + LowerExp + Send + Sync
{
    /// Converts an `f64` literal or configuration value into `Self`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every supported float")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite float converts to f64")
    }

    /// Relative machine precision, used to scale rank and singularity tests.
    fn eps() -> Self {
        Self::default_epsilon()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex sample type used throughout.
pub type Cx<T> = Complex<T>;

#[cfg(test)]
pub(crate) fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

pub(crate) fn cx_real<T: Real>(re: T) -> Cx<T> {
    Complex::new(re, T::zero())
}

/// Unit-modulus phasor `exp(j * phase)`.
pub(crate) fn phasor<T: Real>(phase: T) -> Cx<T> {
    Complex::new(phase.cos(), phase.sin())
}

pub(crate) fn abs2<T: Real>(z: Cx<T>) -> T {
    z.re * z.re + z.im * z.im
}

pub(crate) fn modulus<T: Real>(z: Cx<T>) -> T {
    z.re.hypot(z.im)
}
