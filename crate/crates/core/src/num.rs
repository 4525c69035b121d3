//! Scalar abstraction for the numeric kernels.

use core::fmt;
use core::iter::Sum;
use core::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar: f32 or f64.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Sum
        + fmt::Debug
        + fmt::Display
        + Send
        + Sync
        + 'static
{
}

/// Shorthand for lossy conversion of an `f64` constant into the scalar type.
#[inline]
pub fn cast<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("f64 constant representable in scalar type")
}

/// Sign with the fixed global tie-break sign(0) = +1.
#[inline]
pub fn sign_pm<F: Real>(v: F) -> F {
    if v >= F::zero() {
        F::one()
    } else {
        -F::one()
    }
}
