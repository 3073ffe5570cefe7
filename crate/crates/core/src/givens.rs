//! Givens rotations acting on two consecutive indices.
//!
//! A rotation is stored as `(c, s)` with `c` real and non-negative. Applied
//! from the left it maps
//!
//! ```text
//! [x]    [  c     s ] [x]
//! [y] -> [ -s̄     c ] [y]
//! ```
//!
//! which is `Q^H` for `Q = [[c, -s], [s̄, c]]`. A similarity `Q^H A Q` uses
//! [`Givens::apply_left`] on rows and [`Givens::apply_right`] on columns.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Givens<T> {
    pub c: f64,
    pub s: T,
}

impl<T: Scalar> Givens<T> {
    pub fn identity() -> Self {
        Givens {
            c: 1.0,
            s: T::zero(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.c == 1.0 && self.s.is_zero()
    }

    /// Returns `Q^H (x, y)`.
    #[inline(always)]
    pub fn apply_left(&self, x: T, y: T) -> (T, T) {
        (
            x.scale(self.c) + self.s * y,
            y.scale(self.c) - self.s.conj() * x,
        )
    }

    /// Returns `Q (x, y)`, the inverse of [`Givens::apply_left`].
    #[inline(always)]
    pub fn apply_left_adjoint(&self, x: T, y: T) -> (T, T) {
        (
            x.scale(self.c) - self.s * y,
            y.scale(self.c) + self.s.conj() * x,
        )
    }

    /// Returns the row vector `(x, y) Q`, i.e. the update of two columns.
    #[inline(always)]
    pub fn apply_right(&self, x: T, y: T) -> (T, T) {
        (
            x.scale(self.c) + self.s.conj() * y,
            y.scale(self.c) - self.s * x,
        )
    }

    pub fn adjoint(&self) -> Self {
        Givens {
            c: self.c,
            s: -self.s,
        }
    }
}

/// Computes `G` and `r` with `G^H (a, b) = (r, 0)` and `|r| = ||(a, b)||_2`.
///
/// Follows the `zrotg` convention: `c >= 0` and `r` carries the phase of `a`.
/// When `a = 0` the rotation swaps with `c = 0` and `s = conj(b)/|b|`.
pub fn make_givens<T: Scalar>(a: T, b: T) -> Result<(Givens<T>, T)> {
    if !a.is_finite() {
        return Err(Error::NonFinite {
            what: "rotation input",
            index: 0,
        });
    }
    if !b.is_finite() {
        return Err(Error::NonFinite {
            what: "rotation input",
            index: 1,
        });
    }
    Ok(givens(a, b))
}

/// Unchecked variant of [`make_givens`] used on the hot path.
#[inline(always)]
pub(crate) fn givens<T: Scalar>(a: T, b: T) -> (Givens<T>, T) {
    if b.is_zero() {
        return (Givens::identity(), a);
    }
    let abs_b = b.abs();
    if a.is_zero() {
        let s = b.conj().scale(1.0 / abs_b);
        return (Givens { c: 0.0, s }, T::from_real(abs_b));
    }
    let abs_a = a.abs();
    // hypot scales internally, so inputs up to f64::MAX stay finite.
    let rho = abs_a.hypot(abs_b);
    let c = abs_a / rho;
    let phase = a.scale(1.0 / abs_a);
    let s = phase * b.conj().scale(1.0 / rho);
    (Givens { c, s }, phase.scale(rho))
}
