//! Scalar abstraction for the numeric core.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the whole crate is generic over: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Convert an `f64` literal (tolerances, table constants) into `T`.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal must convert into the scalar type")
}

/// A tolerance with an `f64`-scale floor that widens to `eps_mult·ε` for
/// coarser scalars. For `f64` the floor always wins, so stated tolerances
/// are exact there; `f32` gets the same checks at its own precision.
#[inline]
pub fn tol<T: Scalar>(floor: f64, eps_mult: f64) -> T {
    lit::<T>(floor).max(T::epsilon() * lit(eps_mult))
}

/// sin(x)/x with the removable singularity filled in.
#[inline]
pub fn sinc<T: Scalar>(x: T) -> T {
    if x.abs() < lit(1e-8) {
        // 1 - x^2/6 keeps full accuracy through the crossover
        T::one() - x * x / lit(6.0)
    } else {
        x.sin() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_at_zero_and_pi() {
        assert_eq!(sinc(0.0f64), 1.0);
        assert!(sinc(std::f64::consts::PI).abs() < 1e-15);
        assert!((sinc(1.0f64) - 1.0f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn sinc_crossover_is_smooth() {
        let a = sinc(1e-8f64 - 1e-12);
        let b = sinc(1e-8f64 + 1e-12);
        assert!((a - b).abs() < 1e-15);
    }
}
