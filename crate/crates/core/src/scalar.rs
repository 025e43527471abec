//! Scalar abstraction shared by every module.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar the library is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

/// Complex value over a [`Real`].
pub type C<T> = Complex<T>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("literal representable in target float")
}

/// Complex literal.
#[inline]
pub fn clit<T: Real>(re: f64, im: f64) -> C<T> {
    C::new(lit(re), lit(im))
}

/// The imaginary unit.
#[inline]
pub fn im_unit<T: Real>() -> C<T> {
    C::new(T::zero(), T::one())
}

/// Real number lifted to the complex plane.
#[inline]
pub fn cre<T: Real>(v: T) -> C<T> {
    C::new(v, T::zero())
}

/// Modulus of the largest entry.
pub fn max_abs<T: Real>(vals: impl IntoIterator<Item = C<T>>) -> T {
    vals.into_iter().fold(T::zero(), |m, v| m.max(v.norm()))
}
