//! Chebyshev series machinery: grids, interpolation through a type-I DCT,
//! adaptive degree selection, Clenshaw evaluation, and the reverse map from a
//! root set to Chebyshev coefficients.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::path::Path;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{norm2, Complex64, Scalar};

/// Coefficients `c_0..c_n` of `sum c_k T_k(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebSeries<T> {
    coeffs: Vec<T>,
    /// Set once the series has been divided by its leading coefficient.
    monic: bool,
}

impl<T: Scalar> ChebSeries<T> {
    /// Wraps a coefficient vector; an empty vector becomes the zero constant.
    pub fn new(mut coeffs: Vec<T>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(T::zero());
        }
        ChebSeries {
            coeffs,
            monic: false,
        }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> T {
        self.coeffs[self.degree()]
    }

    pub fn is_monic(&self) -> bool {
        self.monic
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.coeffs)
    }

    /// Divides by the leading coefficient so that `c_n = 1` exactly.
    pub fn monic_normalized(&self) -> Result<Self> {
        let lead = self.leading();
        if lead.is_zero() {
            return Err(Error::LeadingCoefficient {
                lead: 0.0,
                max: self.max_abs(),
            });
        }
        let n = self.degree();
        let mut coeffs: Vec<T> = self.coeffs.iter().map(|&c| c / lead).collect();
        coeffs[n] = T::one();
        Ok(ChebSeries {
            coeffs,
            monic: true,
        })
    }

    /// Drops trailing coefficients with `|c_k| <= tol * max |c|`. Monic
    /// series keep their leading coefficient.
    pub fn trimmed(&self, tol: f64) -> Self {
        if self.monic {
            return self.clone();
        }
        let cut = tol * self.max_abs();
        let mut len = self.coeffs.len();
        while len > 1 && self.coeffs[len - 1].abs() <= cut {
            len -= 1;
        }
        ChebSeries {
            coeffs: self.coeffs[..len].to_vec(),
            monic: false,
        }
    }

    /// Evaluates the series at `x` by the Clenshaw recurrence.
    pub fn eval(&self, x: T) -> T {
        clenshaw(&self.coeffs, x)
    }

    pub fn to_complex(&self) -> ChebSeries<Complex64> {
        ChebSeries {
            coeffs: self.coeffs.iter().map(|c| c.to_complex()).collect(),
            monic: self.monic,
        }
    }

    /// Evaluates at a complex point regardless of the coefficient type.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let mut b1 = Complex64::new(0.0, 0.0);
        let mut b2 = Complex64::new(0.0, 0.0);
        for &c in self.coeffs[1..].iter().rev() {
            let b0 = c.to_complex() + z * b1 * 2.0 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0].to_complex() + z * b1 - b2
    }
}

/// Clenshaw recurrence for `sum c_k T_k(x)`.
pub fn clenshaw<T: Scalar>(coeffs: &[T], x: T) -> T {
    match coeffs.len() {
        0 => T::zero(),
        1 => coeffs[0],
        _ => {
            let two_x = x.scale(2.0);
            let mut b1 = T::zero();
            let mut b2 = T::zero();
            for &c in coeffs[1..].iter().rev() {
                let b0 = c + two_x * b1 - b2;
                b2 = b1;
                b1 = b0;
            }
            coeffs[0] + x * b1 - b2
        }
    }
}

/// Chebyshev points of the second kind, `x_j = cos(j pi / n)`, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebGrid {
    pub n: usize,
    pub points: Vec<f64>,
}

/// Builds the `n + 1` point grid. `n = 0` yields the single point `{1}`.
///
/// Points are evaluated as `sin(pi (n - 2j) / (2n))`, which is exactly
/// symmetric about zero and hits `0` and `+-1` exactly.
pub fn cheb_points(n: usize) -> ChebGrid {
    if n == 0 {
        return ChebGrid {
            n,
            points: vec![1.0],
        };
    }
    let nf = n as f64;
    let points = (0..=n)
        .map(|j| {
            let t = (n as f64 - 2.0 * j as f64) / nf;
            (FRAC_PI_2 * t).sin()
        })
        .collect();
    ChebGrid { n, points }
}

/// How `values_to_coeffs` evaluates the cosine transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DctMethod {
    /// FFT for `n >= 8`, direct summation below.
    #[default]
    Auto,
    Fft,
    /// O(n^2) summation; kept as an independent reference.
    Direct,
}

/// Interpolation coefficients from values on [`cheb_points`]`(n)`.
pub fn values_to_coeffs<T: Scalar>(values: &[T]) -> Result<ChebSeries<T>> {
    values_to_coeffs_with(values, DctMethod::Auto)
}

pub fn values_to_coeffs_with<T: Scalar>(values: &[T], method: DctMethod) -> Result<ChebSeries<T>> {
    if values.is_empty() {
        return Err(Error::LengthMismatch {
            expected: 1,
            got: 0,
        });
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "sample value",
            index,
        });
    }
    let n = values.len() - 1;
    if n == 0 {
        return Ok(ChebSeries::new(vec![values[0]]));
    }
    let use_fft = match method {
        DctMethod::Auto => n >= 8,
        DctMethod::Fft => true,
        DctMethod::Direct => false,
    };
    let coeffs = if use_fft {
        dct1_fft(values)
    } else {
        dct1_direct(values)
    };
    Ok(ChebSeries::new(coeffs))
}

fn dct1_direct<T: Scalar>(values: &[T]) -> Vec<T> {
    let n = values.len() - 1;
    let nf = n as f64;
    (0..=n)
        .map(|k| {
            let mut acc = T::zero();
            for (j, &f) in values.iter().enumerate() {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                // reduce k*j mod 2n before scaling to keep the angle small
                let m = (k * j) % (2 * n);
                let ang = std::f64::consts::PI * m as f64 / nf;
                acc += f.scale(w * ang.cos());
            }
            let edge = if k == 0 || k == n { 0.5 } else { 1.0 };
            acc.scale(2.0 * edge / nf)
        })
        .collect()
}

fn dct1_fft<T: Scalar>(values: &[T]) -> Vec<T> {
    let n = values.len() - 1;
    let len = 2 * n;
    let mut buf: Vec<Complex64> = Vec::with_capacity(len);
    buf.extend(values.iter().map(|v| v.to_complex()));
    buf.extend(values[1..n].iter().rev().map(|v| v.to_complex()));
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(len).process(&mut buf);
    let nf = n as f64;
    (0..=n)
        .map(|k| {
            let edge = if k == 0 || k == n { 0.5 } else { 1.0 };
            T::from_complex(buf[k] * (edge / nf))
        })
        .collect()
}

/// Smallest and largest grid parameter tried by [`adapt_interpolate`].
pub const ADAPT_MIN_N: usize = 16;
pub const ADAPT_MAX_N: usize = 1 << 16;

/// Interpolates `f` on [-1, 1] at Chebyshev points, doubling `n` from 16
/// until the trailing `max(3, n/8)` coefficients are all below `tol * scale`,
/// then trims the negligible tail. The scale is the larger of `max |c_k|`
/// and `max |f(x_j)|` on the grid, since rounding noise in the coefficients
/// follows the size of the sampled values.
///
/// Fails with [`Error::NoPlateau`] (carrying the last series) when no
/// plateau appears by `n = 2^16`.
pub fn adapt_interpolate<F>(f: F, tol: f64) -> Result<ChebSeries<f64>>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must lie in (0, 1), got {tol}"
        )));
    }
    let mut n = ADAPT_MIN_N;
    loop {
        let grid = cheb_points(n);
        let values: Vec<f64> = grid.points.iter().map(|&x| f(x)).collect();
        let series = values_to_coeffs(&values)?;
        let vscale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let max = series.max_abs().max(vscale);
        if max == 0.0 {
            return Ok(ChebSeries::new(vec![0.0]));
        }
        let tail = (n / 8).max(3);
        let plateau = series.coeffs()[n + 1 - tail..]
            .iter()
            .all(|c| c.abs() <= tol * max);
        if plateau {
            let keep = series
                .coeffs()
                .iter()
                .rposition(|c| c.abs() > tol * max)
                .unwrap_or(0);
            return Ok(ChebSeries::new(series.coeffs()[..=keep].to_vec()));
        }
        if n >= ADAPT_MAX_N {
            return Err(Error::NoPlateau {
                max_degree: n,
                best: Box::new(series),
            });
        }
        n *= 2;
    }
}

/// Chebyshev coefficients of `prod (x - y_j)`.
///
/// The result is not rescaled: its degree-`n` coefficient is `2^(1-n)`.
/// When the roots are closed under conjugation the imaginary parts of the
/// result are exactly zero.
pub fn roots_to_cheb(roots: &[Complex64]) -> Result<ChebSeries<Complex64>> {
    let (series, exp2) = roots_to_cheb_scaled(roots)?;
    let factor = 2f64.powi(exp2);
    let coeffs = series.coeffs.iter().map(|c| c * factor).collect();
    Ok(ChebSeries::new(coeffs))
}

/// Same product as [`roots_to_cheb`], rescaled by a power of two after every
/// factor so that high degrees neither underflow nor overflow. Returns the
/// series and the exponent `e` such that the true product is `series * 2^e`.
pub fn roots_to_cheb_scaled(roots: &[Complex64]) -> Result<(ChebSeries<Complex64>, i32)> {
    if roots.is_empty() {
        return Err(Error::DegreeTooSmall { degree: 0, min: 1 });
    }
    if let Some(index) = roots.iter().position(|r| !r.is_finite()) {
        return Err(Error::NonFinite { what: "root", index });
    }
    let n = roots.len();
    let mut acc = vec![Complex64::new(0.0, 0.0); n + 1];
    acc[0] = Complex64::new(1.0, 0.0);
    let mut exp2 = 0i32;

    // Factors are multiplied in Leja order; taking them in an arbitrary order
    // lets intermediate coefficients grow exponentially and cancel later.
    // Conjugate pairs are also multiplied as two linear factors: combining
    // them into real quadratics loses accuracy for pairs close to the real
    // axis, which is exactly where they sit for Chebyshev interpolants.
    let mut scratch = vec![Complex64::new(0.0, 0.0); n + 1];
    for (deg, k) in leja_order(roots).into_iter().enumerate() {
        mul_linear(&mut acc, &mut scratch, deg, roots[k]);
        exp2 += rescale(&mut acc[..=deg + 1]);
    }
    if closed_under_conjugation(roots) {
        for c in acc.iter_mut() {
            c.im = 0.0;
        }
    }
    Ok((ChebSeries::new(acc), exp2))
}

/// Greedy Leja ordering: start from the point of largest modulus, then
/// repeatedly take the point maximizing the product of distances to the
/// points already chosen. Ties keep the original order.
pub(crate) fn leja_order(points: &[Complex64]) -> Vec<usize> {
    let n = points.len();
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let mut score = vec![0.0f64; n];
    let Some(first) = (0..n).reduce(|a, b| if points[b].norm() > points[a].norm() { b } else { a })
    else {
        return order;
    };
    let mut last = first;
    used[first] = true;
    order.push(first);
    for _ in 1..n {
        let mut best = usize::MAX;
        let mut best_score = f64::NEG_INFINITY;
        for k in 0..n {
            if used[k] {
                continue;
            }
            score[k] += (points[k] - points[last]).norm().ln();
            if best == usize::MAX || score[k] > best_score {
                best = k;
                best_score = score[k];
            }
        }
        used[best] = true;
        order.push(best);
        last = best;
    }
    order
}

/// True when the multiset `roots` is exactly closed under conjugation.
fn closed_under_conjugation(roots: &[Complex64]) -> bool {
    let key = |z: &Complex64| (z.re.to_bits(), z.im.abs().to_bits());
    let mut upper: Vec<Complex64> = roots.iter().copied().filter(|r| r.im > 0.0).collect();
    let mut lower: Vec<Complex64> = roots.iter().filter(|r| r.im < 0.0).map(|r| r.conj()).collect();
    if upper.len() != lower.len() {
        return false;
    }
    upper.sort_by_key(key);
    lower.sort_by_key(key);
    upper == lower
}

/// `acc <- (x - y) acc` for a series of degree `deg`.
fn mul_linear<T: Scalar>(acc: &mut [T], scratch: &mut [T], deg: usize, y: T) {
    mul_x(acc, scratch, deg);
    for k in 0..=deg {
        scratch[k] -= y * acc[k];
    }
    acc[..=deg + 1].copy_from_slice(&scratch[..=deg + 1]);
}

/// `out[..=deg+1] <- x * c` using `x T_0 = T_1`, `x T_k = (T_{k+1} + T_{k-1}) / 2`.
fn mul_x<T: Scalar>(c: &[T], out: &mut [T], deg: usize) {
    for o in out[..=deg + 1].iter_mut() {
        *o = T::zero();
    }
    out[1] += c[0];
    for k in 1..=deg {
        let half = c[k].scale(0.5);
        out[k + 1] += half;
        out[k - 1] += half;
    }
}

/// Scales `c` by a power of two so its largest entry lies in [1, 2).
/// Returns the exponent removed.
fn rescale<T: Scalar>(c: &mut [T]) -> i32 {
    let max = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 || !max.is_finite() {
        return 0;
    }
    let e = max.log2().floor() as i32;
    if e == 0 {
        return 0;
    }
    let factor = 2f64.powi(-e);
    for x in c.iter_mut() {
        *x = x.scale(factor);
    }
    e
}

/// Coefficients read from a coefficient file.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    Real(ChebSeries<f64>),
    Complex(ChebSeries<Complex64>),
}

impl Coefficients {
    pub fn degree(&self) -> usize {
        match self {
            Coefficients::Real(p) => p.degree(),
            Coefficients::Complex(p) => p.degree(),
        }
    }
}

/// Parses the text coefficient format: one coefficient per line, `c_0`
/// first, `#` starts a comment, complex entries written as `re im`.
pub fn parse_coefficients(text: &str, origin: &str) -> Result<Coefficients> {
    let bad = |line: usize, msg: String| Error::BadCoefficientFile {
        path: origin.to_string(),
        line,
        msg,
    };
    let mut entries: Vec<(usize, f64, Option<f64>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut fields = content.split_whitespace();
        let mut next_number = |what: &str| -> Result<Option<f64>> {
            match fields.next() {
                None => Ok(None),
                Some(tok) => tok
                    .parse::<f64>()
                    .map(Some)
                    .map_err(|_| bad(line_no, format!("cannot parse {what} `{tok}`"))),
            }
        };
        let re = next_number("real part")?.expect("non-empty line has a token");
        let im = next_number("imaginary part")?;
        if fields.next().is_some() {
            return Err(bad(line_no, "expected `re` or `re im`".into()));
        }
        if !re.is_finite() || im.is_some_and(|v| !v.is_finite()) {
            return Err(bad(line_no, "non-finite coefficient".into()));
        }
        entries.push((line_no, re, im));
    }
    if entries.is_empty() {
        return Err(bad(0, "no coefficients".into()));
    }
    if entries.iter().any(|e| e.2.is_some()) {
        let coeffs = entries
            .iter()
            .map(|&(_, re, im)| Complex64::new(re, im.unwrap_or(0.0)))
            .collect();
        Ok(Coefficients::Complex(ChebSeries::new(coeffs)))
    } else {
        Ok(Coefficients::Real(ChebSeries::new(
            entries.iter().map(|e| e.1).collect(),
        )))
    }
}

pub fn read_coefficients(path: impl AsRef<Path>) -> Result<Coefficients> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::BadCoefficientFile {
        path: path.display().to_string(),
        line: 0,
        msg: e.to_string(),
    })?;
    parse_coefficients(&text, &path.display().to_string())
}

/// Formats a series in the coefficient file format.
pub fn format_coefficients<T: Scalar>(series: &ChebSeries<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# degree {}", series.degree());
    for c in series.coeffs() {
        if T::IS_COMPLEX {
            let _ = writeln!(out, "{:e} {:e}", c.re(), c.im());
        } else {
            let _ = writeln!(out, "{:e}", c.re());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn grid_small_cases() {
        assert_eq!(cheb_points(1).points, vec![1.0, -1.0]);
        assert_eq!(cheb_points(2).points, vec![1.0, 0.0, -1.0]);
        let g = cheb_points(4).points;
        let h = 2f64.sqrt() / 2.0;
        for (a, b) in g.iter().zip([1.0, h, 0.0, -h, -1.0]) {
            assert!((a - b).abs() <= f64::EPSILON);
        }
        assert_eq!(cheb_points(0).points, vec![1.0]);
    }

    #[test]
    fn grid_is_symmetric_and_decreasing() {
        for n in [3usize, 7, 16, 101] {
            let g = cheb_points(n).points;
            for j in 0..=n {
                assert_eq!(g[j], -g[n - j]);
                if j > 0 {
                    assert!(g[j] < g[j - 1]);
                }
            }
        }
    }

    #[test]
    fn coeffs_of_simple_values() {
        let close = |got: &[f64], want: [f64; 3]| {
            got.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-15)
        };
        let c = values_to_coeffs(&[1.0, 0.0, -1.0]).unwrap();
        assert!(close(c.coeffs(), [0.0, 1.0, 0.0]));
        let c = values_to_coeffs(&[5.0, 5.0, 5.0]).unwrap();
        assert!(close(c.coeffs(), [5.0, 0.0, 0.0]));
    }

    #[test]
    fn coeffs_of_t2() {
        // 2x^2 - 1 on {1, 0, -1} is {1, -1, 1}
        let c = values_to_coeffs(&[1.0, -1.0, 1.0]).unwrap();
        for (a, b) in c.coeffs().iter().zip([0.0, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn non_finite_samples_rejected() {
        assert!(values_to_coeffs(&[1.0, f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn clenshaw_examples() {
        assert_eq!(ChebSeries::new(vec![0.0, 1.0]).eval(0.3), 0.3);
        assert!((ChebSeries::new(vec![0.0, 0.0, 1.0]).eval(0.5) + 0.5).abs() < 1e-16);
        assert_eq!(ChebSeries::new(vec![1.0, 1.0, 1.0]).eval(1.0), 3.0);
    }

    #[test]
    fn adapt_identity() {
        let p = adapt_interpolate(|x| x, 1e-14).unwrap();
        assert_eq!(p.degree(), 1);
        assert!(p.coeffs()[0].abs() < 1e-15);
        assert!((p.coeffs()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn adapt_oscillatory_degree() {
        let p = adapt_interpolate(|x| x.exp() * (800.0 * x).sin(), 1e-14).unwrap();
        assert!((850..=950).contains(&p.degree()), "degree {}", p.degree());
        for x in [-0.93, -0.1, 0.0, 0.41, 0.999] {
            let want = f64::exp(x) * (800.0 * x).sin();
            assert!((p.eval(x) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn adapt_rejects_bad_tolerance() {
        assert!(adapt_interpolate(|x| x, 0.0).is_err());
        assert!(adapt_interpolate(|x| x, 1.5).is_err());
    }

    #[test]
    fn adapt_non_smooth_fails_with_best_series() {
        match adapt_interpolate(|x| x.abs().sqrt() * x.signum(), 1e-15) {
            Err(Error::NoPlateau { max_degree, best }) => {
                assert_eq!(max_degree, ADAPT_MAX_N);
                assert_eq!(best.degree(), ADAPT_MAX_N);
            }
            other => panic!("expected NoPlateau, got {other:?}"),
        }
    }

    #[test]
    fn roots_to_cheb_examples() {
        let p = roots_to_cheb(&[Complex64::new(0.0, 0.0)]).unwrap();
        assert_eq!(p.coeffs(), &[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);

        let r = [
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(-FRAC_1_SQRT_2, 0.0),
        ];
        let p = roots_to_cheb(&r).unwrap();
        // x^2 - 1/2 = T_2 / 2
        assert!(p.coeffs()[0].norm() < 1e-15);
        assert!(p.coeffs()[1].norm() < 1e-15);
        assert!((p.coeffs()[2].re - 0.5).abs() < 1e-15);

        let t5: Vec<Complex64> = (1..=5)
            .map(|k| Complex64::new(((2 * k - 1) as f64 * PI / 10.0).cos(), 0.0))
            .collect();
        let p = roots_to_cheb(&t5).unwrap();
        for k in 0..5 {
            assert!(p.coeffs()[k].norm() < 1e-15, "c{k} = {}", p.coeffs()[k]);
        }
        assert!((p.coeffs()[5].re - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn conjugate_roots_give_real_product() {
        let r = [
            Complex64::new(0.3, 0.4),
            Complex64::new(-0.2, 0.0),
            Complex64::new(0.3, -0.4),
        ];
        let p = roots_to_cheb(&r).unwrap();
        assert!(p.coeffs().iter().all(|c| c.im == 0.0));
        for &z in &r {
            assert!(p.eval_complex(z).norm() < 1e-15);
        }
    }

    #[test]
    fn roots_to_cheb_rejects_bad_input() {
        assert!(roots_to_cheb(&[]).is_err());
        assert!(roots_to_cheb(&[Complex64::new(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn scaled_product_survives_high_degree() {
        let roots: Vec<Complex64> = (0..1500)
            .map(|k| Complex64::new(((k as f64 + 0.5) * PI / 1500.0).cos(), 0.0))
            .collect();
        let (p, e) = roots_to_cheb_scaled(&roots).unwrap();
        assert!(p.coeffs().iter().all(|c| c.is_finite()));
        // T_1500 / 2^1499: every coefficient but the last is negligible
        let lead = p.coeffs()[1500].norm();
        let rest = p.coeffs()[..1500].iter().fold(0.0f64, |m, c| m.max(c.norm()));
        assert!(rest < 1e-12 * lead, "rest {rest:e}");
        assert_eq!(e + lead.log2().round() as i32, -1499);
    }

    #[test]
    fn monic_and_trim() {
        let p = ChebSeries::new(vec![1.0, 2.0, 4.0, 1e-20]);
        let t = p.trimmed(1e-14);
        assert_eq!(t.degree(), 2);
        let m = t.monic_normalized().unwrap();
        assert!(m.is_monic());
        assert_eq!(m.leading(), 1.0);
        assert_eq!(m.coeffs(), &[0.25, 0.5, 1.0]);
        let tiny = ChebSeries::new(vec![1.0, 1e-30]).monic_normalized().unwrap();
        assert_eq!(tiny.trimmed(1e-14).degree(), 1);
        assert!(ChebSeries::new(vec![1.0, 0.0]).monic_normalized().is_err());
    }

    #[test]
    fn coefficient_file_roundtrip() {
        let text = "# test\n0.5\n-1.25  # inline\n\n2\n";
        let c = parse_coefficients(text, "mem").unwrap();
        assert_eq!(c, Coefficients::Real(ChebSeries::new(vec![0.5, -1.25, 2.0])));
        let z = parse_coefficients("1 2\n3\n", "mem").unwrap();
        match z {
            Coefficients::Complex(p) => {
                assert_eq!(p.coeffs(), &[Complex64::new(1.0, 2.0), Complex64::new(3.0, 0.0)])
            }
            _ => panic!("expected complex"),
        }
        let back = parse_coefficients(&format_coefficients(&ChebSeries::new(vec![0.1, 3.0])), "m")
            .unwrap();
        assert_eq!(back, Coefficients::Real(ChebSeries::new(vec![0.1, 3.0])));
    }

    #[test]
    fn coefficient_file_errors_carry_line() {
        match parse_coefficients("1\nabc\n", "f.txt") {
            Err(Error::BadCoefficientFile { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_coefficients("1 2 3\n", "f").is_err());
        assert!(parse_coefficients("# only comments\n", "f").is_err());
        assert!(parse_coefficients("inf\n", "f").is_err());
    }
}
