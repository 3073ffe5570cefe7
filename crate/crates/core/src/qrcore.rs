//! Structured QR iteration on [`Generators`].
//!
//! Every rotation updates `d`, `beta`, `u` and `v` in O(1); the
//! superdiagonal is recomputed from the generators whenever it is needed, so
//! a sweep over an `m`-row window costs O(m) and the whole solve O(n^2).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::aed;
use crate::colleague::{Generators, OffHessenberg};
use crate::error::{ConvergenceFailure, Error, Result};
use crate::givens::{givens, Givens};
use crate::scalar::{Complex64, Scalar};

pub(crate) const EPS: f64 = f64::EPSILON;

/// Storage the kernels operate on. Implemented by [`Generators`] and by the
/// shared view used by the parallel driver.
pub(crate) trait GenStore<T: Scalar> {
    fn d(&self, i: usize) -> T;
    fn beta(&self, i: usize) -> T;
    fn u(&self, i: usize) -> T;
    fn v(&self, i: usize) -> T;
    fn set_d(&mut self, i: usize, x: T);
    fn set_beta(&mut self, i: usize, x: T);
    fn set_u(&mut self, i: usize, x: T);
    fn set_v(&mut self, i: usize, x: T);
}

impl<T: Scalar> GenStore<T> for Generators<T> {
    #[inline(always)]
    fn d(&self, i: usize) -> T {
        self.d[i]
    }
    #[inline(always)]
    fn beta(&self, i: usize) -> T {
        self.beta[i]
    }
    #[inline(always)]
    fn u(&self, i: usize) -> T {
        self.u[i]
    }
    #[inline(always)]
    fn v(&self, i: usize) -> T {
        self.v[i]
    }
    #[inline(always)]
    fn set_d(&mut self, i: usize, x: T) {
        self.d[i] = x;
    }
    #[inline(always)]
    fn set_beta(&mut self, i: usize, x: T) {
        self.beta[i] = x;
    }
    #[inline(always)]
    fn set_u(&mut self, i: usize, x: T) {
        self.u[i] = x;
    }
    #[inline(always)]
    fn set_v(&mut self, i: usize, x: T) {
        self.v[i] = x;
    }
}

#[inline(always)]
pub(crate) fn superdiag<T: Scalar, S: GenStore<T>>(s: &S, i: usize) -> T {
    s.beta(i).conj() - s.u(i + 1).conj() * s.v(i) + s.u(i) * s.v(i + 1).conj()
}

/// Observer for every rotation applied on rows `(row, row + 1)`.
pub(crate) trait RotationHook<T> {
    fn rotated(&mut self, row: usize, g: &Givens<T>);
}

pub(crate) struct NoHook;

impl<T> RotationHook<T> for NoHook {
    #[inline(always)]
    fn rotated(&mut self, _: usize, _: &Givens<T>) {}
}

/// A rotation together with the first of the two rows it acts on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationRecord<T> {
    pub row: usize,
    pub g: Givens<T>,
}

impl<T: Copy> RotationHook<T> for Vec<RotationRecord<T>> {
    fn rotated(&mut self, row: usize, g: &Givens<T>) {
        self.push(RotationRecord { row, g: *g });
    }
}

// ---------------------------------------------------------------------------
// Stability tracking

/// Running supremum of the windowed generator products
/// `||u[a ..= a+j+1]|| * ||v[a-1 ..= a+j]||` over all rotations applied.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityTracker {
    gamma_hat: f64,
    rotations: u64,
    sweeps: u64,
    window_j: usize,
    n: usize,
    #[serde(skip)]
    log: Option<Vec<LoggedRotation>>,
}

/// Rotation applied to `u` and `v`, in application order. Real rotations are
/// stored with a zero imaginary part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoggedRotation {
    pub row: usize,
    pub c: f64,
    pub s: Complex64,
}

impl StabilityTracker {
    /// Seeds the supremum with a full scan of `g`.
    pub fn new<T: Scalar>(g: &Generators<T>, window_j: usize) -> Self {
        let n = g.dim();
        StabilityTracker {
            gamma_hat: gamma_j(g.u(), g.v(), window_j),
            rotations: 0,
            sweeps: 0,
            window_j,
            n,
            log: None,
        }
    }

    /// Keeps every rotation so a run can be replayed afterwards.
    pub fn with_log(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    pub fn gamma_hat(&self) -> f64 {
        self.gamma_hat
    }

    pub fn rotations(&self) -> u64 {
        self.rotations
    }

    pub fn sweeps(&self) -> u64 {
        self.sweeps
    }

    pub fn window_j(&self) -> usize {
        self.window_j
    }

    pub fn log(&self) -> Option<&[LoggedRotation]> {
        self.log.as_deref()
    }

    pub(crate) fn take_log(&mut self) -> Option<Vec<LoggedRotation>> {
        self.log.take()
    }

    pub(crate) fn count_sweep(&mut self) {
        self.sweeps += 1;
    }

    /// Folds another tracker's supremum and counters into this one.
    pub fn merge(&mut self, other: &StabilityTracker) {
        self.gamma_hat = self.gamma_hat.max(other.gamma_hat);
        self.rotations += other.rotations;
        self.sweeps += other.sweeps;
    }

    pub(crate) fn fork(&self) -> StabilityTracker {
        StabilityTracker {
            gamma_hat: self.gamma_hat,
            rotations: 0,
            sweeps: 0,
            window_j: self.window_j,
            n: self.n,
            log: None,
        }
    }

    /// Re-evaluates the windows overlapping rows `lo..=hi` after one rotation.
    #[inline]
    pub(crate) fn probe<T: Scalar, S: GenStore<T>>(&mut self, s: &S, lo: usize, hi: usize) {
        self.rotations += 1;
        let (n, j) = (self.n, self.window_j);
        if n <= j {
            return;
        }
        let first = lo.saturating_sub(j + 1);
        let last = (hi + 1).min(n - j - 1);
        for a in first..=last {
            let g = window_product(s, a, j, n);
            if g > self.gamma_hat {
                self.gamma_hat = g;
            }
        }
    }

    /// Probes rows `lo..=hi` of plain slices, for callers holding `u` and `v`
    /// directly.
    pub fn probe_slices<T: Scalar>(&mut self, u: &[T], v: &[T], lo: usize, hi: usize) {
        struct View<'a, T>(&'a [T], &'a [T]);
        impl<T: Scalar> GenStore<T> for View<'_, T> {
            fn d(&self, _: usize) -> T {
                unreachable!()
            }
            fn beta(&self, _: usize) -> T {
                unreachable!()
            }
            fn u(&self, i: usize) -> T {
                self.0[i]
            }
            fn v(&self, i: usize) -> T {
                self.1[i]
            }
            fn set_d(&mut self, _: usize, _: T) {}
            fn set_beta(&mut self, _: usize, _: T) {}
            fn set_u(&mut self, _: usize, _: T) {}
            fn set_v(&mut self, _: usize, _: T) {}
        }
        self.probe(&View(u, v), lo, hi);
    }

    fn record<T: Scalar>(&mut self, row: usize, g: &Givens<T>) {
        if let Some(log) = &mut self.log {
            log.push(LoggedRotation {
                row,
                c: g.c,
                s: g.s.to_complex(),
            });
        }
    }
}

#[inline(always)]
fn window_product<T: Scalar, S: GenStore<T>>(s: &S, a: usize, j: usize, n: usize) -> f64 {
    let mut su = 0.0;
    for k in a..=(a + j + 1).min(n - 1) {
        su += s.u(k).abs2();
    }
    let mut sv = 0.0;
    for k in a.saturating_sub(1)..=a + j {
        sv += s.v(k).abs2();
    }
    su.sqrt() * sv.sqrt()
}

/// `gamma_j(u, v)`: the largest windowed product over all window starts.
pub fn gamma_j<T: Scalar>(u: &[T], v: &[T], j: usize) -> f64 {
    let n = u.len();
    let mut best = 0.0f64;
    for a in 0..n.saturating_sub(j) {
        let su: f64 = u[a..=(a + j + 1).min(n - 1)].iter().map(|x| x.abs2()).sum();
        let sv: f64 = v[a.saturating_sub(1)..=a + j].iter().map(|x| x.abs2()).sum();
        best = best.max(su.sqrt() * sv.sqrt());
    }
    best
}

/// Rotates rows `(i, i + 1)` of `u` and `v` and updates the tracker.
#[inline(always)]
pub(crate) fn rotate_uv<T: Scalar, S: GenStore<T>>(
    s: &mut S,
    i: usize,
    g: &Givens<T>,
    tr: &mut StabilityTracker,
) {
    let (a, b) = g.apply_left(s.u(i), s.u(i + 1));
    s.set_u(i, a);
    s.set_u(i + 1, b);
    let (a, b) = g.apply_left(s.v(i), s.v(i + 1));
    s.set_v(i, a);
    s.set_v(i + 1, b);
    tr.record(i, g);
    tr.probe(s, i, i + 1);
}

// ---------------------------------------------------------------------------
// Shifts and sweep plans

/// Shift polynomial of one sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SweepPlan {
    /// `rho(z) = z - shift`.
    Single { shift: Complex64 },
    /// `rho(z) = z^2 - 2 re_sigma z + abs_sigma2`, i.e. `(z - s)(z - conj(s))`
    /// for a conjugate pair, or `(z - s1)(z - s2)` with `re_sigma = (s1 + s2)/2`
    /// and `abs_sigma2 = s1 s2` for two real shifts.
    Double { re_sigma: f64, abs_sigma2: f64 },
}

/// Eigenvalues of `[[a, b], [c, e]]`, the second one being closest to `e`.
/// On a tie the one whose real part has the sign of `e` comes second.
pub(crate) fn eig2<T: Scalar>(a: T, b: T, c: T, e: T) -> (Complex64, Complex64) {
    let (a, b, c, e) = (a.to_complex(), b.to_complex(), c.to_complex(), e.to_complex());
    let p = (a - e) * 0.5;
    let bc = b * c;
    let disc = (p * p + bc).sqrt();
    let (m1, m2) = (p + disc, p - disc);
    let near = |ml: Complex64| {
        if ml == Complex64::new(0.0, 0.0) {
            Complex64::new(0.0, 0.0)
        } else {
            -bc / ml
        }
    };
    let (ml, ms) = if m1.norm() > m2.norm() {
        (m1, near(m1))
    } else if m2.norm() > m1.norm() {
        (m2, near(m2))
    } else {
        let (s1, s2) = (near(m1), near(m2));
        let want_pos = e.re >= 0.0;
        if (s1.re >= 0.0) == want_pos {
            (m1, s1)
        } else {
            (m2, s2)
        }
    };
    (e + ml, e + ms)
}

/// Real 2x2 eigenvalues; a complex pair is returned exactly conjugate.
pub(crate) fn eig2_real(a: f64, b: f64, c: f64, e: f64) -> (Complex64, Complex64) {
    let p = 0.5 * (a - e);
    let bc = b * c;
    let q = p * p + bc;
    if q >= 0.0 {
        let ml = p + q.sqrt().copysign(p);
        let ms = if ml == 0.0 { 0.0 } else { -bc / ml };
        (Complex64::new(e + ml, 0.0), Complex64::new(e + ms, 0.0))
    } else {
        let re = e + p;
        let im = (-q).sqrt();
        (Complex64::new(re, im), Complex64::new(re, -im))
    }
}

fn trailing_block<T: Scalar, S: GenStore<T>>(s: &S, hi: usize) -> (T, T, T, T) {
    (s.d(hi - 1), superdiag(s, hi - 1), s.beta(hi - 1), s.d(hi))
}

/// Wilkinson shift of the active window of `g`: in complex arithmetic the
/// trailing 2x2 eigenvalue closest to the corner, in real arithmetic the
/// shift pair made of both trailing eigenvalues.
pub fn wilkinson_shift<T: Scalar>(g: &Generators<T>) -> Result<SweepPlan> {
    let (lo, hi) = g.active();
    if hi < lo + 1 {
        return Err(Error::InvalidArgument(
            "Wilkinson shift needs an active window of size at least 2".into(),
        ));
    }
    Ok(if T::IS_COMPLEX {
        single_plan(g, hi)
    } else {
        double_plan(g, hi)
    })
}

fn single_plan<T: Scalar, S: GenStore<T>>(s: &S, hi: usize) -> SweepPlan {
    let (a, b, c, e) = trailing_block(s, hi);
    SweepPlan::Single {
        shift: eig2(a, b, c, e).1,
    }
}

fn double_plan<T: Scalar, S: GenStore<T>>(s: &S, hi: usize) -> SweepPlan {
    let (a, b, c, e) = trailing_block(s, hi);
    let (a, b, c, e) = (a.re(), b.re(), c.re(), e.re());
    SweepPlan::Double {
        re_sigma: 0.5 * (a + e),
        abs_sigma2: a * e - b * c,
    }
}

// ---------------------------------------------------------------------------
// Kernels

/// Bulge left behind by a kernel, anchored at column `col`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Bulge<T> {
    /// One entry at `(col + 2, col)`.
    One { col: usize, b: T },
    /// Entries at `(col + 2, col)`, `(col + 3, col)` and `(col + 3, col + 1)`.
    Three { col: usize, b1: T, b2: T, b3: T },
}

impl<T: Copy> Bulge<T> {
    fn entries(&self) -> Vec<OffHessenberg<T>> {
        match *self {
            Bulge::One { col, b } => vec![OffHessenberg {
                row: col + 2,
                col,
                value: b,
            }],
            Bulge::Three { col, b1, b2, b3 } => vec![
                OffHessenberg {
                    row: col + 2,
                    col,
                    value: b1,
                },
                OffHessenberg {
                    row: col + 3,
                    col,
                    value: b2,
                },
                OffHessenberg {
                    row: col + 3,
                    col: col + 1,
                    value: b3,
                },
            ],
        }
    }
}

/// Similarity by `g` on rows/columns `(i, i + 1)` of a matrix that is
/// Hessenberg in columns `>= i`. Returns the entry created at `(i + 2, i)`.
#[inline(always)]
fn rotate_pair<T: Scalar, S: GenStore<T>, H: RotationHook<T>>(
    s: &mut S,
    i: usize,
    hi: usize,
    g: &Givens<T>,
    tr: &mut StabilityTracker,
    hook: &mut H,
) -> Option<T> {
    let (mut a00, mut a01, mut a10, mut a11) = (s.d(i), superdiag(s, i), s.beta(i), s.d(i + 1));
    (a00, a10) = g.apply_left(a00, a10);
    (a01, a11) = g.apply_left(a01, a11);
    (a00, _) = g.apply_right(a00, a01);
    (a10, a11) = g.apply_right(a10, a11);
    s.set_d(i, a00);
    s.set_beta(i, a10);
    s.set_d(i + 1, a11);
    let bulge = if i + 2 <= hi {
        let (b, beta) = g.apply_right(T::zero(), s.beta(i + 1));
        s.set_beta(i + 1, beta);
        Some(b)
    } else {
        None
    };
    hook.rotated(i, g);
    rotate_uv(s, i, g, tr);
    bulge
}

/// Similarity by `G2` on rows `(i + 1, i + 2)` followed by `G1` on rows
/// `(i, i + 1)`, with `b20` the entry currently at `(i + 2, i)`.
#[allow(clippy::too_many_arguments)]
#[inline(always)]
fn rotate_triple<T: Scalar, S: GenStore<T>, H: RotationHook<T>>(
    s: &mut S,
    i: usize,
    hi: usize,
    b20: T,
    g2: &Givens<T>,
    g1: &Givens<T>,
    tr: &mut StabilityTracker,
    hook: &mut H,
) -> Bulge<T> {
    // The (i, i + 2) entry includes the conjugated bulge entry: F is
    // Hermitian, so a nonzero b20 shows up above the diagonal as well.
    let a02 = b20.conj() - s.u(i + 2).conj() * s.v(i) + s.u(i) * s.v(i + 2).conj();
    let mut m = [
        [s.d(i), superdiag(s, i), a02],
        [s.beta(i), s.d(i + 1), superdiag(s, i + 1)],
        [b20, s.beta(i + 1), s.d(i + 2)],
    ];
    let has_row3 = i + 3 <= hi;
    let mut r = [T::zero(), T::zero(), if has_row3 { s.beta(i + 2) } else { T::zero() }];
    for c in 0..3 {
        (m[1][c], m[2][c]) = g2.apply_left(m[1][c], m[2][c]);
    }
    for c in 0..3 {
        (m[0][c], m[1][c]) = g1.apply_left(m[0][c], m[1][c]);
    }
    for row in m.iter_mut() {
        (row[1], row[2]) = g2.apply_right(row[1], row[2]);
    }
    (r[1], r[2]) = g2.apply_right(r[1], r[2]);
    for row in m.iter_mut() {
        (row[0], row[1]) = g1.apply_right(row[0], row[1]);
    }
    (r[0], r[1]) = g1.apply_right(r[0], r[1]);
    s.set_d(i, m[0][0]);
    s.set_d(i + 1, m[1][1]);
    s.set_d(i + 2, m[2][2]);
    s.set_beta(i, m[1][0]);
    s.set_beta(i + 1, m[2][1]);
    hook.rotated(i + 1, g2);
    rotate_uv(s, i + 1, g2, tr);
    hook.rotated(i, g1);
    rotate_uv(s, i, g1, tr);
    if has_row3 {
        s.set_beta(i + 2, r[2]);
        Bulge::Three {
            col: i,
            b1: m[2][0],
            b2: r[0],
            b3: r[1],
        }
    } else {
        Bulge::One {
            col: i,
            b: m[2][0],
        }
    }
}

/// First rotation of a single-shift sweep on `lo..=hi`.
#[inline]
pub(crate) fn start_single<T: Scalar, S: GenStore<T>, H: RotationHook<T>>(
    s: &mut S,
    lo: usize,
    hi: usize,
    sigma: T,
    tr: &mut StabilityTracker,
    hook: &mut H,
) -> Option<Bulge<T>> {
    let (g, _) = givens(s.d(lo) - sigma, s.beta(lo));
    rotate_pair(s, lo, hi, &g, tr, hook).map(|b| Bulge::One { col: lo, b })
}

/// `(A^2 - 2 re A + abs2 I) e_1` restricted to its three nonzero entries,
/// taken at the head `lo` of the window.
#[inline]
fn double_column<T: Scalar, S: GenStore<T>>(s: &S, lo: usize, re: f64, abs2: f64) -> [T; 3] {
    let (d1, d2, b1, b2) = (s.d(lo), s.d(lo + 1), s.beta(lo), s.beta(lo + 1));
    let g1 = superdiag(s, lo);
    [
        d1 * d1 + g1 * b1 - d1.scale(2.0 * re) + T::from_real(abs2),
        b1 * (d1 + d2 - T::from_real(2.0 * re)),
        b1 * b2,
    ]
}

/// First two rotations of a double-shift sweep on `lo..=hi` (size >= 3).
#[inline]
pub(crate) fn start_double<T: Scalar, S: GenStore<T>, H: RotationHook<T>>(
    s: &mut S,
    lo: usize,
    hi: usize,
    re: f64,
    abs2: f64,
    tr: &mut StabilityTracker,
    hook: &mut H,
) -> Option<Bulge<T>> {
    let [x, y, z] = double_column(s, lo, re, abs2);
    let (g2, y) = givens(y, z);
    let (g1, _) = givens(x, y);
    Some(rotate_triple(s, lo, hi, T::zero(), &g2, &g1, tr, hook))
}

/// Pushes the bulge one column down; `None` once it has left the window.
#[inline]
pub(crate) fn chase<T: Scalar, S: GenStore<T>, H: RotationHook<T>>(
    s: &mut S,
    hi: usize,
    bulge: Bulge<T>,
    tr: &mut StabilityTracker,
    hook: &mut H,
) -> Option<Bulge<T>> {
    match bulge {
        Bulge::One { col, b } => {
            let (g, r) = givens(s.beta(col), b);
            s.set_beta(col, r);
            rotate_pair(s, col + 1, hi, &g, tr, hook).map(|b| Bulge::One { col: col + 1, b })
        }
        Bulge::Three { col, b1, b2, b3 } => {
            let (g2, t) = givens(b1, b2);
            let (g1, r) = givens(s.beta(col), t);
            s.set_beta(col, r);
            Some(rotate_triple(s, col + 1, hi, b3, &g2, &g1, tr, hook))
        }
    }
}

pub(crate) fn start_sweep<T: Scalar, S: GenStore<T>, H: RotationHook<T>>(
    s: &mut S,
    lo: usize,
    hi: usize,
    plan: &SweepPlan,
    tr: &mut StabilityTracker,
    hook: &mut H,
) -> Option<Bulge<T>> {
    match *plan {
        SweepPlan::Single { shift } => start_single(s, lo, hi, T::from_complex(shift), tr, hook),
        SweepPlan::Double {
            re_sigma,
            abs_sigma2,
        } => start_double(s, lo, hi, re_sigma, abs_sigma2, tr, hook),
    }
}

/// One full implicit QR sweep on `lo..=hi`.
pub(crate) fn sweep<T: Scalar, S: GenStore<T>, H: RotationHook<T>>(
    s: &mut S,
    lo: usize,
    hi: usize,
    plan: &SweepPlan,
    tr: &mut StabilityTracker,
    hook: &mut H,
) {
    let mut bulge = start_sweep(s, lo, hi, plan, tr, hook);
    while let Some(b) = bulge {
        bulge = chase(s, hi, b, tr, hook);
    }
    tr.count_sweep();
}

// ---------------------------------------------------------------------------
// Public step-by-step interface (bulge kept in the generators' buffer)

/// `(d_lo - sigma, beta_lo)` at the head of the active window.
pub fn leading_column_single<T: Scalar>(g: &Generators<T>, sigma: T) -> Result<[T; 2]> {
    let (lo, hi) = g.active();
    if hi < lo + 1 {
        return Err(Error::InvalidArgument("active window must have size >= 2".into()));
    }
    Ok([g.d[lo] - sigma, g.beta[lo]])
}

/// Nonzero part of `(A^2 - 2 re_sigma A + abs_sigma2 I) e_1` at the head of
/// the active window.
pub fn leading_column_double(g: &Generators<f64>, re_sigma: f64, abs_sigma2: f64) -> Result<[f64; 3]> {
    let (lo, hi) = g.active();
    if hi < lo + 2 {
        return Err(Error::InvalidArgument("active window must have size >= 3".into()));
    }
    Ok(double_column(g, lo, re_sigma, abs_sigma2))
}

fn check_plan<T: Scalar>(g: &Generators<T>, plan: &SweepPlan) -> Result<()> {
    let (lo, hi) = g.active();
    match plan {
        SweepPlan::Single { shift } => {
            if !T::IS_COMPLEX && shift.im != 0.0 {
                return Err(Error::InvalidArgument(
                    "a complex shift needs complex generators".into(),
                ));
            }
            if hi < lo + 1 {
                return Err(Error::InvalidArgument("active window must have size >= 2".into()));
            }
        }
        SweepPlan::Double { .. } => {
            if T::IS_COMPLEX {
                return Err(Error::InvalidArgument(
                    "double-shift sweeps run in real arithmetic".into(),
                ));
            }
            if hi < lo + 2 {
                return Err(Error::InvalidArgument("active window must have size >= 3".into()));
            }
        }
    }
    if !g.bulge.is_empty() {
        return Err(Error::InvalidArgument("a bulge is already being chased".into()));
    }
    Ok(())
}

fn store_bulge<T: Scalar>(g: &mut Generators<T>, b: Option<Bulge<T>>) {
    g.bulge = b.map(|b| b.entries()).unwrap_or_default();
}

fn load_bulge<T: Scalar>(g: &Generators<T>) -> Option<Bulge<T>> {
    let col = g.bulge.iter().map(|b| b.col).min()?;
    if g.bulge.len() == 1 {
        Some(Bulge::One {
            col,
            b: g.bulge[0].value,
        })
    } else {
        Some(Bulge::Three {
            col,
            b1: g.bulge_at(col + 2, col),
            b2: g.bulge_at(col + 3, col),
            b3: g.bulge_at(col + 3, col + 1),
        })
    }
}

/// Applies the first rotation(s) of a sweep with `plan` to the active
/// window and records the bulge in `g`. Returns the rotations applied.
pub fn begin_sweep<T: Scalar>(
    g: &mut Generators<T>,
    plan: &SweepPlan,
    tr: &mut StabilityTracker,
) -> Result<Vec<RotationRecord<T>>> {
    check_plan(g, plan)?;
    let (lo, hi) = g.active();
    let mut log = Vec::new();
    let b = start_sweep(g, lo, hi, plan, tr, &mut log);
    store_bulge(g, b);
    Ok(log)
}

/// Advances the recorded bulge by one chasing step. Returns `None` when no
/// bulge is present.
pub fn chase_step<T: Scalar>(
    g: &mut Generators<T>,
    tr: &mut StabilityTracker,
) -> Option<Vec<RotationRecord<T>>> {
    let b = load_bulge(g)?;
    let hi = g.active().1;
    let mut log = Vec::new();
    let next = chase(g, hi, b, tr, &mut log);
    store_bulge(g, next);
    if next.is_none() {
        tr.count_sweep();
    }
    Some(log)
}

/// Runs a complete sweep; returns every rotation in application order.
pub fn full_sweep<T: Scalar>(
    g: &mut Generators<T>,
    plan: &SweepPlan,
    tr: &mut StabilityTracker,
) -> Result<Vec<RotationRecord<T>>> {
    let mut log = begin_sweep(g, plan, tr)?;
    while let Some(more) = chase_step(g, tr) {
        log.extend(more);
    }
    Ok(log)
}

// ---------------------------------------------------------------------------
// Deflation

#[inline]
pub(crate) fn negligible<T: Scalar, S: GenStore<T>>(s: &S, i: usize, eps: f64) -> bool {
    let b = s.beta(i).abs();
    b == 0.0 || b <= eps * (s.d(i).abs() + s.d(i + 1).abs()) || b < f64::MIN_POSITIVE / EPS
}

/// Zeroes every negligible subdiagonal entry of the active window and moves
/// the head of the window to the lowest unreduced block. Returns the indices
/// `i` whose `beta[i]` was set to zero.
pub fn deflation_scan<T: Scalar>(g: &mut Generators<T>, eps: f64) -> Vec<usize> {
    let (lo, hi) = g.active();
    let mut hits = Vec::new();
    for i in lo..hi {
        if negligible(g, i, eps) {
            g.beta[i] = T::zero();
            hits.push(i);
        }
    }
    if let Some(&last) = hits.last() {
        g.active = (last + 1, hi);
    }
    hits
}

// ---------------------------------------------------------------------------
// Drivers

/// Aggressive early deflation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AedOptions {
    pub enabled: bool,
    /// Fixed window size; `None` picks `min(16, max(4, active / 16))`.
    pub window: Option<usize>,
    /// Attempt AED after this many sweeps without one.
    pub every: usize,
}

impl Default for AedOptions {
    fn default() -> Self {
        AedOptions {
            enabled: true,
            window: None,
            every: 5,
        }
    }
}

impl AedOptions {
    pub fn disabled() -> Self {
        AedOptions {
            enabled: false,
            ..Default::default()
        }
    }

    pub(crate) fn window_for(&self, active: usize) -> usize {
        self.window
            .unwrap_or_else(|| (active / 16).clamp(4, 16))
            .min(active.saturating_sub(1))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveOptions {
    pub aed: AedOptions,
    /// Sweeps are capped at `max_sweeps_factor * n`.
    pub max_sweeps_factor: usize,
    /// An exceptional shift replaces the regular one after this many sweeps
    /// without deflation.
    pub exceptional_every: usize,
    /// Seed of the exceptional-shift generator.
    pub seed: u64,
    /// Collect a per-sweep trace in the report.
    pub trace: bool,
    /// Keep every rotation applied to `u`, `v` in the report.
    pub log_rotations: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            aed: AedOptions::default(),
            max_sweeps_factor: 50,
            exceptional_every: 15,
            seed: 0x5eed,
            trace: false,
            log_rotations: false,
        }
    }
}

/// An eigenvalue split off at `position` (1-based) during sweep `sweep`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deflation {
    pub position: usize,
    pub sweep: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "lowercase")]
pub enum TraceEvent {
    Sweep {
        sweep: usize,
        active_window: (usize, usize),
        shift: SweepPlan,
        gamma_hat: f64,
        deflations: usize,
    },
    Aed {
        k: usize,
        deflated: usize,
        shifts_returned: usize,
        spike_norm: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RootReport {
    /// Eigenvalues by position along the diagonal.
    pub eigenvalues: Vec<Complex64>,
    /// QR sweeps on the active window. Sweeps spent inside AED windows are
    /// counted separately in `aed_sweeps`.
    pub iterations: usize,
    pub main_sweeps: usize,
    pub aed_sweeps: usize,
    pub aed_calls: usize,
    pub aed_deflated: usize,
    pub gamma_hat: f64,
    /// Window parameter `j` of the reported `gamma_hat`.
    pub gamma_j: usize,
    pub rotations: u64,
    pub deflations: Vec<Deflation>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub trace: Vec<TraceEvent>,
    #[serde(skip)]
    pub rotation_log: Option<Vec<LoggedRotation>>,
}

/// Shift strategy and closed-form pieces that differ between complex
/// single-shift and real double-shift iteration.
pub(crate) trait Mode: Copy + Send + Sync + 'static {
    type T: Scalar;
    /// Window parameter of the stability measure.
    const J: usize;

    fn regular<S: GenStore<Self::T>>(s: &S, hi: usize) -> SweepPlan;
    fn exceptional<S: GenStore<Self::T>>(s: &S, lo: usize, hi: usize, rng: &mut ChaCha8Rng) -> SweepPlan;
    /// Turns AED shift candidates (nearest to the corner first) into plans.
    fn plans(shifts: &[Complex64]) -> Vec<SweepPlan>;
    /// Smallest window swept; smaller blocks are solved in closed form.
    const MIN_SWEEP: usize = 3;
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SingleShift;

#[derive(Debug, Clone, Copy)]
pub(crate) struct DoubleShift;

fn exceptional_scale<T: Scalar, S: GenStore<T>>(s: &S, lo: usize, hi: usize) -> f64 {
    let mut x = s.beta(hi - 1).abs();
    if hi >= lo + 2 {
        x += s.beta(hi - 2).abs();
    }
    if x == 0.0 {
        x = s.d(hi).abs().max(1.0);
    }
    x
}

impl Mode for SingleShift {
    type T = Complex64;
    const J: usize = 1;

    fn regular<S: GenStore<Complex64>>(s: &S, hi: usize) -> SweepPlan {
        single_plan(s, hi)
    }

    fn exceptional<S: GenStore<Complex64>>(
        s: &S,
        lo: usize,
        hi: usize,
        rng: &mut ChaCha8Rng,
    ) -> SweepPlan {
        let SweepPlan::Single { shift } = single_plan(s, hi) else {
            unreachable!()
        };
        let r = exceptional_scale(s, lo, hi) * rng.random_range(0.5..1.5);
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        SweepPlan::Single {
            shift: shift + Complex64::from_polar(0.75 * r, theta),
        }
    }

    fn plans(shifts: &[Complex64]) -> Vec<SweepPlan> {
        shifts.iter().map(|&shift| SweepPlan::Single { shift }).collect()
    }
}

impl Mode for DoubleShift {
    type T = f64;
    const J: usize = 2;

    fn regular<S: GenStore<f64>>(s: &S, hi: usize) -> SweepPlan {
        double_plan(s, hi)
    }

    fn exceptional<S: GenStore<f64>>(s: &S, lo: usize, hi: usize, rng: &mut ChaCha8Rng) -> SweepPlan {
        let x = exceptional_scale(s, lo, hi) * rng.random_range(0.5..1.5);
        let h11 = 0.75 * x + s.d(hi);
        let h12 = -0.4375 * x;
        SweepPlan::Double {
            re_sigma: h11,
            abs_sigma2: h11 * h11 - h12 * x,
        }
    }

    fn plans(shifts: &[Complex64]) -> Vec<SweepPlan> {
        let mut out = Vec::new();
        let mut pending_real: Option<f64> = None;
        let mut used = vec![false; shifts.len()];
        for i in 0..shifts.len() {
            if used[i] {
                continue;
            }
            let z = shifts[i];
            if z.im != 0.0 {
                if let Some(k) = (i + 1..shifts.len()).find(|&k| !used[k] && shifts[k] == z.conj()) {
                    used[k] = true;
                }
                out.push(SweepPlan::Double {
                    re_sigma: z.re,
                    abs_sigma2: z.norm_sqr(),
                });
            } else if let Some(r) = pending_real.take() {
                out.push(SweepPlan::Double {
                    re_sigma: 0.5 * (r + z.re),
                    abs_sigma2: r * z.re,
                });
            } else {
                pending_real = Some(z.re);
            }
            used[i] = true;
        }
        if let Some(r) = pending_real {
            out.push(SweepPlan::Double {
                re_sigma: r,
                abs_sigma2: r * r,
            });
        }
        out
    }
}

/// Settings of one run of the driver loop.
#[derive(Debug, Clone)]
pub(crate) struct RunConfig {
    pub aed: Option<AedOptions>,
    /// Leave the window in (quasi-)triangular Schur form: 2x2 blocks with
    /// real eigenvalues are split by an explicit rotation.
    pub schur: bool,
    pub max_sweeps: usize,
    pub exceptional_every: usize,
    pub trace: bool,
}

/// Mutable bookkeeping of one run.
#[derive(Debug)]
pub(crate) struct RunState {
    pub sweeps: usize,
    pub aed_sweeps: usize,
    pub aed_calls: usize,
    pub aed_deflated: usize,
    pub deflations: Vec<Deflation>,
    pub trace: Vec<TraceEvent>,
    pub rng: ChaCha8Rng,
}

impl RunState {
    pub(crate) fn new(seed: u64) -> Self {
        RunState {
            sweeps: 0,
            aed_sweeps: 0,
            aed_calls: 0,
            aed_deflated: 0,
            deflations: Vec::new(),
            trace: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

/// The window `lo..=hi` on which the iteration gave up.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Stuck {
    pub lo: usize,
    pub hi: usize,
}

/// Splits the 2x2 block at `(lo, lo + 1)`. In Schur mode a block with real
/// (or, in complex arithmetic, any) eigenvalues is triangularized by one
/// rotation; otherwise the eigenvalues are only read off.
fn solve_block2<T: Scalar, S: GenStore<T>, H: RotationHook<T>>(
    s: &mut S,
    lo: usize,
    schur: bool,
    tr: &mut StabilityTracker,
    hook: &mut H,
) -> (Complex64, Complex64) {
    let (a, b, c, e) = trailing_block(s, lo + 1);
    let (l1, l2) = if T::IS_COMPLEX {
        eig2(a, b, c, e)
    } else {
        eig2_real(a.re(), b.re(), c.re(), e.re())
    };
    if !schur || (!T::IS_COMPLEX && l1.im != 0.0) {
        return (l1, l2);
    }
    let (g, _) = givens(a - T::from_complex(l2), c);
    rotate_pair(s, lo, lo + 1, &g, tr, hook);
    s.set_beta(lo, T::zero());
    (s.d(lo).to_complex(), s.d(lo + 1).to_complex())
}

/// Driver loop on `lo0..=hi0`. Eigenvalues are written to
/// `eig[position - lo0]`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn run<M: Mode, S: GenStore<M::T>, H: RotationHook<M::T>>(
    s: &mut S,
    lo0: usize,
    hi0: usize,
    cfg: &RunConfig,
    tr: &mut StabilityTracker,
    hook: &mut H,
    eig: &mut [Complex64],
    st: &mut RunState,
) -> std::result::Result<(), Stuck> {
    let mut hi = hi0 as isize;
    let mut stagnant = 0usize;
    let mut since_aed = 0usize;
    let mut fresh = true;
    let mut queue: Vec<SweepPlan> = Vec::new();
    let mut queue_window = (usize::MAX, usize::MAX);
    while hi >= lo0 as isize {
        let h = hi as usize;
        let mut lo = h;
        while lo > lo0 {
            if negligible(s, lo - 1, EPS) {
                s.set_beta(lo - 1, M::T::zero());
                break;
            }
            lo -= 1;
        }
        if lo == h {
            eig[h - lo0] = s.d(h).to_complex();
            st.deflations.push(Deflation {
                position: h + 1,
                sweep: st.sweeps,
            });
            hi -= 1;
            stagnant = 0;
            continue;
        }
        if h - lo + 1 < M::MIN_SWEEP {
            let (l1, l2) = solve_block2(s, lo, cfg.schur, tr, hook);
            eig[lo - lo0] = l1;
            eig[h - lo0] = l2;
            for p in [h, lo] {
                st.deflations.push(Deflation {
                    position: p + 1,
                    sweep: st.sweeps,
                });
            }
            hi -= 2;
            stagnant = 0;
            continue;
        }
        if st.sweeps >= cfg.max_sweeps {
            return Err(Stuck { lo, hi: h });
        }
        let size = h - lo + 1;
        if let Some(aed_opts) = cfg.aed {
            let k = aed_opts.window_for(size);
            if k >= 2 && size >= 3 * k && (fresh || since_aed >= aed_opts.every) {
                fresh = false;
                since_aed = 0;
                if let Some(out) = aed::aed_step::<M, S>(s, lo, h, k, tr, cfg, st) {
                    queue = M::plans(&out.shifts);
                    queue.reverse();
                    queue_window = (lo, h);
                    if out.deflated > 0 {
                        // Deflated rows are split off on the next pass; try
                        // again on what is left before sweeping.
                        fresh = true;
                        stagnant = 0;
                        continue;
                    }
                }
            }
        }
        if queue_window.1 != h {
            queue.clear();
        }
        stagnant += 1;
        let plan = if cfg.exceptional_every > 0 && stagnant.is_multiple_of(cfg.exceptional_every) {
            M::exceptional(s, lo, h, &mut st.rng)
        } else if let Some(p) = queue.pop() {
            p
        } else {
            M::regular(s, h)
        };
        sweep(s, lo, h, &plan, tr, hook);
        st.sweeps += 1;
        since_aed += 1;
        if cfg.trace {
            st.trace.push(TraceEvent::Sweep {
                sweep: st.sweeps,
                active_window: (lo + 1, h + 1),
                shift: plan,
                gamma_hat: tr.gamma_hat(),
                deflations: st.deflations.len(),
            });
        }
    }
    Ok(())
}

pub(crate) fn solve<M: Mode>(
    g: &mut Generators<M::T>,
    opts: &SolveOptions,
) -> Result<RootReport> {
    validate(g)?;
    let n = g.dim();
    let mut tr = StabilityTracker::new(g, M::J);
    if opts.log_rotations {
        tr = tr.with_log();
    }
    let cfg = RunConfig {
        aed: opts.aed.enabled.then_some(opts.aed),
        schur: false,
        max_sweeps: opts.max_sweeps_factor.saturating_mul(n).max(1),
        exceptional_every: opts.exceptional_every,
        trace: opts.trace,
    };
    let mut st = RunState::new(opts.seed);
    let mut eig = vec![Complex64::new(0.0, 0.0); n];
    g.bulge.clear();
    let (lo, hi) = g.active();
    let outcome = run::<M, _, _>(g, lo, hi, &cfg, &mut tr, &mut NoHook, &mut eig, &mut st);
    finish(outcome, eig, tr, st, M::J)
}

pub(crate) fn finish(
    outcome: std::result::Result<(), Stuck>,
    eig: Vec<Complex64>,
    mut tr: StabilityTracker,
    st: RunState,
    j: usize,
) -> Result<RootReport> {
    match outcome {
        Ok(()) => Ok(RootReport {
            eigenvalues: eig,
            iterations: st.sweeps,
            main_sweeps: st.sweeps,
            aed_sweeps: st.aed_sweeps,
            aed_calls: st.aed_calls,
            aed_deflated: st.aed_deflated,
            gamma_hat: tr.gamma_hat(),
            gamma_j: j,
            rotations: tr.rotations(),
            deflations: st.deflations,
            trace: st.trace,
            rotation_log: tr.take_log(),
        }),
        Err(stuck) => {
            let converged = st
                .deflations
                .iter()
                .map(|d| (d.position - 1, eig[d.position - 1]))
                .collect();
            Err(Error::NoConvergence(Box::new(ConvergenceFailure {
                converged,
                sweeps: st.sweeps + st.aed_sweeps,
                gamma_hat: tr.gamma_hat(),
                window: (stuck.lo, stuck.hi),
            })))
        }
    }
}

pub(crate) fn validate<T: Scalar>(g: &Generators<T>) -> Result<()> {
    for (what, xs) in [("d", &g.d), ("u", &g.u), ("v", &g.v)] {
        if let Some(index) = xs.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what, index });
        }
    }
    if let Some(index) = g.beta.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { what: "beta", index });
    }
    Ok(())
}

/// All eigenvalues of a complex generator matrix by single-shift sweeps.
/// The active window of `g` is solved; positions outside it are left zero.
pub fn eigenvalues(g: &mut Generators<Complex64>, opts: &SolveOptions) -> Result<RootReport> {
    solve::<SingleShift>(g, opts)
}

/// All eigenvalues of a real generator matrix by double-shift sweeps in real
/// arithmetic. Complex eigenvalues come in exactly conjugate pairs.
pub fn eigenvalues_real(g: &mut Generators<f64>, opts: &SolveOptions) -> Result<RootReport> {
    solve::<DoubleShift>(g, opts)
}
