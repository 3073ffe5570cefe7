//! Scalar abstraction over `f64` and `Complex64`.
//!
//! The structured kernels are written once and instantiated for real
//! (double-shift) and complex (single-shift) arithmetic.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

pub use num_complex::Complex64;

/// Field operations the solver needs.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Default
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + 'static
{
    const IS_COMPLEX: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;
    /// Builds a scalar from a complex value, dropping the imaginary part for
    /// real scalars.
    fn from_complex(z: Complex64) -> Self;
    fn to_complex(self) -> Complex64;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn conj(self) -> Self;
    /// Modulus, computed without undue overflow.
    fn abs(self) -> f64;
    /// Squared modulus.
    fn abs2(self) -> f64;
    fn scale(self, a: f64) -> Self;
    fn is_finite(self) -> bool;

    fn is_zero(self) -> bool {
        self == Self::zero()
    }
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;

    #[inline(always)]
    fn zero() -> Self {
        0.0
    }
    #[inline(always)]
    fn one() -> Self {
        1.0
    }
    #[inline(always)]
    fn from_real(x: f64) -> Self {
        x
    }
    #[inline(always)]
    fn from_complex(z: Complex64) -> Self {
        z.re
    }
    #[inline(always)]
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    #[inline(always)]
    fn re(self) -> f64 {
        self
    }
    #[inline(always)]
    fn im(self) -> f64 {
        0.0
    }
    #[inline(always)]
    fn conj(self) -> Self {
        self
    }
    #[inline(always)]
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    #[inline(always)]
    fn abs2(self) -> f64 {
        self * self
    }
    #[inline(always)]
    fn scale(self, a: f64) -> Self {
        self * a
    }
    #[inline(always)]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;

    #[inline(always)]
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    #[inline(always)]
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    #[inline(always)]
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    #[inline(always)]
    fn from_complex(z: Complex64) -> Self {
        z
    }
    #[inline(always)]
    fn to_complex(self) -> Complex64 {
        self
    }
    #[inline(always)]
    fn re(self) -> f64 {
        self.re
    }
    #[inline(always)]
    fn im(self) -> f64 {
        self.im
    }
    #[inline(always)]
    fn conj(self) -> Self {
        Complex64::new(self.re, -self.im)
    }
    #[inline(always)]
    fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
    #[inline(always)]
    fn abs2(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
    #[inline(always)]
    fn scale(self, a: f64) -> Self {
        Complex64::new(self.re * a, self.im * a)
    }
    #[inline(always)]
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Euclidean norm of a slice, accumulated in index order.
pub fn norm2<T: Scalar>(x: &[T]) -> f64 {
    let mut scale = 0.0f64;
    for &xi in x {
        scale = scale.max(xi.abs());
    }
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let inv = 1.0 / scale;
    let mut sum = 0.0;
    for &xi in x {
        sum += xi.scale(inv).abs2();
    }
    scale * sum.sqrt()
}
