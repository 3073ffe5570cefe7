//! Colleague matrix in generator form.
//!
//! An upper Hessenberg matrix `A = F + u v^H` with `F` Hermitian is fully
//! determined by its diagonal `d`, subdiagonal `beta` and the vectors `u`,
//! `v`: every entry above the subdiagonal follows from the Hermitian symmetry
//! of `F`. Indices are 0-based; `beta[i]` holds `A[i + 1][i]`.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::chebtech::ChebSeries;
use crate::error::{Error, Result};
use crate::scalar::{norm2, Scalar};

/// Largest dimension [`Generators::densify`] will materialize.
pub const DENSIFY_LIMIT: usize = 4096;

/// Default relative threshold on the leading coefficient (scaled by `n`).
pub const DEFAULT_MONIC_TOL: f64 = 1e-300;

/// An entry below the subdiagonal, e.g. a bulge between chasing steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffHessenberg<T> {
    pub row: usize,
    pub col: usize,
    pub value: T,
}

/// The four-vector representation of an upper Hessenberg
/// Hermitian-plus-rank-one matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generators<T> {
    pub(crate) d: Vec<T>,
    pub(crate) beta: Vec<T>,
    pub(crate) u: Vec<T>,
    pub(crate) v: Vec<T>,
    /// Unreduced window, inclusive.
    pub(crate) active: (usize, usize),
    /// Entries below the subdiagonal that are currently nonzero.
    pub(crate) bulge: Vec<OffHessenberg<T>>,
}

/// Builds the colleague matrix of `p` (degree `n >= 2`).
///
/// `F` is half the tridiagonal matrix with unit off-diagonals, except for the
/// last pair which is `sqrt(2)/2`; `u = e_1` and `v` holds the conjugated
/// row `-(1 / (2 p_n)) [p_{n-1}, ..., p_1, sqrt(2) p_0]`. The diagonal is the
/// diagonal of `F + u v^H`, so `d_1 = -p_{n-1} / (2 p_n)` and the rest is 0.
pub fn build_colleague<T: Scalar>(p: &ChebSeries<T>, monic_tol: f64) -> Result<Generators<T>> {
    let n = p.degree();
    if n < 2 {
        return Err(Error::DegreeTooSmall { degree: n, min: 2 });
    }
    if let Some(index) = p.coeffs().iter().position(|c| !c.is_finite()) {
        return Err(Error::NonFinite {
            what: "coefficient",
            index,
        });
    }
    let lead = p.leading();
    let max = p.max_abs();
    if !(lead.abs() > monic_tol * n as f64 * max) {
        return Err(Error::LeadingCoefficient {
            lead: lead.abs(),
            max,
        });
    }
    let c = p.coeffs();
    let scale = -(T::one() / lead.scale(2.0));
    let mut v: Vec<T> = (0..n)
        .map(|k| {
            let coeff = if k + 1 < n {
                c[n - 1 - k]
            } else {
                c[0].scale(std::f64::consts::SQRT_2)
            };
            (scale * coeff).conj()
        })
        .collect();
    // The rank-one term is u v^H; storing conjugates makes its first row the
    // display row exactly.
    for x in v.iter_mut() {
        if !x.is_finite() {
            return Err(Error::LeadingCoefficient {
                lead: lead.abs(),
                max,
            });
        }
    }
    let mut u = vec![T::zero(); n];
    u[0] = T::one();
    let mut beta = vec![T::from_real(0.5); n - 1];
    beta[n - 2] = T::from_real(FRAC_1_SQRT_2);
    let mut d = vec![T::zero(); n];
    d[0] = v[0].conj();
    Ok(Generators {
        d,
        beta,
        u,
        v,
        active: (0, n - 1),
        bulge: Vec::new(),
    })
}

impl<T: Scalar> Generators<T> {
    /// Assembles generators from raw parts; the active window spans the
    /// whole matrix.
    pub fn from_parts(d: Vec<T>, beta: Vec<T>, u: Vec<T>, v: Vec<T>) -> Result<Self> {
        let n = d.len();
        if n == 0 {
            return Err(Error::DegreeTooSmall { degree: 0, min: 1 });
        }
        if beta.len() + 1 != n {
            return Err(Error::LengthMismatch {
                expected: n - 1,
                got: beta.len(),
            });
        }
        for x in [&u, &v] {
            if x.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: x.len(),
                });
            }
        }
        Ok(Generators {
            d,
            beta,
            u,
            v,
            active: (0, n - 1),
            bulge: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn d(&self) -> &[T] {
        &self.d
    }

    pub fn beta(&self) -> &[T] {
        &self.beta
    }

    pub fn u(&self) -> &[T] {
        &self.u
    }

    pub fn v(&self) -> &[T] {
        &self.v
    }

    pub fn active(&self) -> (usize, usize) {
        self.active
    }

    pub fn set_active(&mut self, lo: usize, hi: usize) -> Result<()> {
        if lo > hi || hi >= self.dim() {
            return Err(Error::IndexOutOfRange {
                i: lo,
                j: hi,
                n: self.dim(),
            });
        }
        self.active = (lo, hi);
        Ok(())
    }

    pub fn bulge(&self) -> &[OffHessenberg<T>] {
        &self.bulge
    }

    /// Records (or clears, for a zero value) an entry below the subdiagonal.
    pub fn set_bulge_entry(&mut self, row: usize, col: usize, value: T) -> Result<()> {
        if row >= self.dim() || row < col + 2 {
            return Err(Error::IndexOutOfRange {
                i: row,
                j: col,
                n: self.dim(),
            });
        }
        self.bulge.retain(|b| !(b.row == row && b.col == col));
        if !value.is_zero() {
            self.bulge.push(OffHessenberg { row, col, value });
        }
        Ok(())
    }

    pub(crate) fn bulge_at(&self, row: usize, col: usize) -> T {
        self.bulge
            .iter()
            .find(|b| b.row == row && b.col == col)
            .map_or(T::zero(), |b| b.value)
    }

    /// Superdiagonal entry `A[i][i + 1]`, recomputed from the generators.
    #[inline]
    pub fn superdiag(&self, i: usize) -> T {
        self.beta[i].conj() - self.u[i + 1].conj() * self.v[i] + self.u[i] * self.v[i + 1].conj()
    }

    /// Entry `A[i][j]` of the represented matrix, bulge entries included.
    pub fn entry(&self, i: usize, j: usize) -> Result<T> {
        let n = self.dim();
        if i >= n || j >= n {
            return Err(Error::IndexOutOfRange { i, j, n });
        }
        Ok(self.entry_unchecked(i, j))
    }

    fn entry_unchecked(&self, i: usize, j: usize) -> T {
        if i == j {
            self.d[i]
        } else if i == j + 1 {
            self.beta[j]
        } else if i > j + 1 {
            self.bulge_at(i, j)
        } else if j == i + 1 {
            self.superdiag(i)
        } else {
            // F[i][j] = conj(F[j][i]) and F[j][i] = A[j][i] - u_j conj(v_i)
            self.bulge_at(j, i).conj() - self.u[j].conj() * self.v[i]
                + self.u[i] * self.v[j].conj()
        }
    }

    /// Dense copy of the matrix. Refuses dimensions above [`DENSIFY_LIMIT`]
    /// so no solve path can silently allocate `O(n^2)` memory.
    pub fn densify(&self) -> Result<Dense<T>> {
        let n = self.dim();
        if n > DENSIFY_LIMIT {
            return Err(Error::SizeGuard {
                n,
                limit: DENSIFY_LIMIT,
            });
        }
        let mut m = Dense::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.entry_unchecked(i, j);
            }
        }
        Ok(m)
    }

    /// Generators of the principal submatrix on rows/columns `lo..=hi`.
    pub fn slice(&self, lo: usize, hi: usize) -> Result<Generators<T>> {
        if lo > hi || hi >= self.dim() {
            return Err(Error::IndexOutOfRange {
                i: lo,
                j: hi,
                n: self.dim(),
            });
        }
        Generators::from_parts(
            self.d[lo..=hi].to_vec(),
            self.beta[lo..hi].to_vec(),
            self.u[lo..=hi].to_vec(),
            self.v[lo..=hi].to_vec(),
        )
    }

    pub fn u_norm(&self) -> f64 {
        norm2(&self.u)
    }

    pub fn v_norm(&self) -> f64 {
        norm2(&self.v)
    }

    pub fn to_complex(&self) -> Generators<crate::scalar::Complex64> {
        let c = |x: &[T]| x.iter().map(|v| v.to_complex()).collect::<Vec<_>>();
        Generators {
            d: c(&self.d),
            beta: c(&self.beta),
            u: c(&self.u),
            v: c(&self.v),
            active: self.active,
            bulge: self
                .bulge
                .iter()
                .map(|b| OffHessenberg {
                    row: b.row,
                    col: b.col,
                    value: b.value.to_complex(),
                })
                .collect(),
        }
    }
}

/// Small row-major dense matrix used by the reference paths and tests.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    pub fn zeros(n: usize) -> Self {
        Dense {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_upper_hessenberg(&self, tol: f64) -> bool {
        (0..self.n).all(|i| (0..i.saturating_sub(1)).all(|j| self[(i, j)].abs() <= tol))
    }

    pub fn frobenius(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self[(i, j)] - other[(i, j)])
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn to_complex(&self) -> Dense<crate::scalar::Complex64> {
        Dense {
            n: self.n,
            data: self.data.iter().map(|x| x.to_complex()).collect(),
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Dense<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Dense<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}
