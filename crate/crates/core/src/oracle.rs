//! Reference implementations: unstructured dense Hessenberg QR, the
//! coefficient backward error of a set of computed roots, and a bottleneck
//! matching distance between eigenvalue multisets.

use serde::{Deserialize, Serialize};

use crate::chebtech::{roots_to_cheb_scaled, ChebSeries};
use crate::colleague::Dense;
use crate::error::{ConvergenceFailure, Error, Result};
use crate::givens::givens;
use crate::scalar::{norm2, Complex64, Scalar};

const EPS: f64 = f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseOptions {
    /// Diagonal scaling before the iteration (off by default).
    pub balance: bool,
    /// Sweeps are capped at `max_sweeps_factor * n`.
    pub max_sweeps_factor: usize,
}

impl Default for DenseOptions {
    fn default() -> Self {
        DenseOptions {
            balance: false,
            max_sweeps_factor: 50,
        }
    }
}

/// All eigenvalues of `a` by shifted dense QR. Complex matrices use
/// single-shift Wilkinson sweeps; real matrices use Francis double-shift
/// sweeps in real arithmetic. A matrix that is not upper Hessenberg is
/// reduced first by stabilized elementary similarities.
pub fn dense_hessenberg_qr<T: Scalar>(a: &Dense<T>, opts: &DenseOptions) -> Result<Vec<Complex64>> {
    let n = a.dim();
    for i in 0..n {
        for j in 0..n {
            if !a[(i, j)].is_finite() {
                return Err(Error::NonFinite {
                    what: "matrix entry",
                    index: i * n + j,
                });
            }
        }
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.clone();
    if !h.is_upper_hessenberg(0.0) {
        elementary_hessenberg(&mut h);
    }
    if opts.balance {
        balance(&mut h);
    }
    let cap = opts.max_sweeps_factor.saturating_mul(n).max(1);
    if T::IS_COMPLEX {
        complex_qr(h.to_complex(), cap)
    } else {
        let m = Dense::from_fn(n, |i, j| h[(i, j)].re());
        real_qr(m, cap)
    }
}

/// Reduction to upper Hessenberg form by Gaussian elimination with row
/// pivoting, applied as a similarity.
pub fn elementary_hessenberg<T: Scalar>(a: &mut Dense<T>) {
    let n = a.dim();
    for m in 1..n.saturating_sub(1) {
        let mut pivot = m;
        let mut best = 0.0;
        for j in m..n {
            let x = a[(j, m - 1)].abs();
            if x > best {
                best = x;
                pivot = j;
            }
        }
        if pivot != m {
            for j in m - 1..n {
                let t = a[(pivot, j)];
                a[(pivot, j)] = a[(m, j)];
                a[(m, j)] = t;
            }
            for i in 0..n {
                let t = a[(i, pivot)];
                a[(i, pivot)] = a[(i, m)];
                a[(i, m)] = t;
            }
        }
        let x = a[(m, m - 1)];
        if x.is_zero() {
            continue;
        }
        for i in m + 1..n {
            let mut y = a[(i, m - 1)];
            if y.is_zero() {
                continue;
            }
            y = y / x;
            a[(i, m - 1)] = T::zero();
            for j in m..n {
                let t = a[(m, j)];
                a[(i, j)] -= y * t;
            }
            for k in 0..n {
                let t = a[(k, i)];
                a[(k, m)] += y * t;
            }
        }
    }
}

/// Radix-2 diagonal similarity equalizing row and column norms.
pub fn balance<T: Scalar>(a: &mut Dense<T>) {
    const RADIX: f64 = 2.0;
    let n = a.dim();
    loop {
        let mut done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[(i, j)] = a[(i, j)].scale(1.0 / f);
                    a[(j, i)] = a[(j, i)].scale(f);
                }
            }
        }
        if done {
            break;
        }
    }
}

fn stuck(found: Vec<(usize, Complex64)>, sweeps: usize, window: (usize, usize)) -> Error {
    Error::NoConvergence(Box::new(ConvergenceFailure {
        converged: found,
        sweeps,
        gamma_hat: f64::NAN,
        window,
    }))
}

fn converged(eig: &[Complex64], hi: usize) -> Vec<(usize, Complex64)> {
    (hi + 1..eig.len()).map(|i| (i, eig[i])).collect()
}

fn complex_qr(mut h: Dense<Complex64>, cap: usize) -> Result<Vec<Complex64>> {
    let n = h.dim();
    let zero = Complex64::new(0.0, 0.0);
    let mut eig = vec![zero; n];
    let mut sweeps = 0;
    let mut its = 0;
    let mut hi = n - 1;
    loop {
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].abs() + h[(lo, lo)].abs();
            if h[(lo, lo - 1)].abs() <= EPS * s {
                h[(lo, lo - 1)] = zero;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            its = 0;
            if hi == 0 {
                return Ok(eig);
            }
            hi -= 1;
            continue;
        }
        if sweeps >= cap {
            return Err(stuck(converged(&eig, hi), sweeps, (lo, hi)));
        }
        its += 1;
        sweeps += 1;
        let sigma = if its % 10 == 0 {
            let s = h[(hi, hi - 1)].abs() + if hi > lo + 1 { h[(hi - 1, hi - 2)].abs() } else { 0.0 };
            h[(hi, hi)] + Complex64::new(0.75 * s, 0.0)
        } else {
            wilkinson(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        let mut x = h[(lo, lo)] - sigma;
        let mut y = h[(lo + 1, lo)];
        for k in lo..hi {
            if k > lo {
                x = h[(k, k - 1)];
                y = h[(k + 1, k - 1)];
            }
            let (g, _) = givens(x, y);
            let first = if k > lo { k - 1 } else { k };
            for j in first..=hi {
                let (a, b) = g.apply_left(h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = a;
                h[(k + 1, j)] = b;
            }
            for i in lo..=(k + 2).min(hi) {
                let (a, b) = g.apply_right(h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = a;
                h[(i, k + 1)] = b;
            }
            if k > lo {
                h[(k + 1, k - 1)] = zero;
            }
        }
    }
}

/// Eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let (l1, l2) = (d + half + disc, d + half - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn real_qr(mut a: Dense<f64>, cap: usize) -> Result<Vec<Complex64>> {
    let n = a.dim();
    let mut eig = vec![Complex64::new(0.0, 0.0); n];
    let anorm: f64 = (0..n)
        .flat_map(|i| (i.saturating_sub(1)..n).map(move |j| (i, j)))
        .map(|(i, j)| a[(i, j)].abs())
        .sum();
    let mut sweeps = 0;
    let mut t = 0.0;
    let mut nn = n as isize - 1;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let hi = nn as usize;
            let mut l = hi;
            while l >= 1 {
                let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[(l, l - 1)].abs() <= EPS * s {
                    a[(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[(hi, hi)];
            if l == hi {
                eig[hi] = Complex64::new(x + t, 0.0);
                nn -= 1;
                break;
            }
            let mut y = a[(hi - 1, hi - 1)];
            let mut w = a[(hi, hi - 1)] * a[(hi - 1, hi)];
            if l + 1 == hi {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    let z = p + z.copysign(p);
                    let lo_root = if z != 0.0 { x - w / z } else { x + z };
                    eig[hi - 1] = Complex64::new(x + z, 0.0);
                    eig[hi] = Complex64::new(lo_root, 0.0);
                } else {
                    eig[hi - 1] = Complex64::new(x + p, -z);
                    eig[hi] = Complex64::new(x + p, z);
                }
                nn -= 2;
                break;
            }
            if sweeps >= cap {
                return Err(stuck(converged(&eig, hi), sweeps, (l, hi)));
            }
            if its == 10 || its == 20 {
                t += x;
                for i in 0..=hi {
                    a[(i, i)] -= x;
                }
                let s = a[(hi, hi - 1)].abs() + a[(hi - 1, hi - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            sweeps += 1;
            francis_step(&mut a, l, hi, x, y, w);
        }
    }
    Ok(eig)
}

/// One double-shift step on rows `l..=hi` with shifts given through the
/// trailing block data `x = a[hi][hi]`, `y = a[hi-1][hi-1]`, `w` their
/// off-diagonal product.
fn francis_step(a: &mut Dense<f64>, l: usize, hi: usize, x: f64, y: f64, w: f64) {
    let (mut p, mut q, mut r);
    let mut m = hi - 2;
    loop {
        let z = a[(m, m)];
        let rr = x - z;
        let ss = y - z;
        p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
        q = a[(m + 1, m + 1)] - z - rr - ss;
        r = a[(m + 2, m + 1)];
        let s = p.abs() + q.abs() + r.abs();
        p /= s;
        q /= s;
        r /= s;
        if m == l {
            break;
        }
        let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
        let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
        if u <= EPS * v {
            break;
        }
        m -= 1;
    }
    for i in m + 2..=hi {
        a[(i, i - 2)] = 0.0;
        if i != m + 2 {
            a[(i, i - 3)] = 0.0;
        }
    }
    let mut xx = 0.0;
    for k in m..hi {
        if k != m {
            p = a[(k, k - 1)];
            q = a[(k + 1, k - 1)];
            r = if k + 1 != hi { a[(k + 2, k - 1)] } else { 0.0 };
            xx = p.abs() + q.abs() + r.abs();
            if xx != 0.0 {
                p /= xx;
                q /= xx;
                r /= xx;
            }
        }
        let s = (p * p + q * q + r * r).sqrt().copysign(p);
        if s == 0.0 {
            continue;
        }
        if k == m {
            if l != m {
                a[(k, k - 1)] = -a[(k, k - 1)];
            }
        } else {
            a[(k, k - 1)] = -s * xx;
        }
        p += s;
        let (x, y, z) = (p / s, q / s, r / s);
        q /= p;
        r /= p;
        for j in k..=hi {
            let mut pp = a[(k, j)] + q * a[(k + 1, j)];
            if k + 1 != hi {
                pp += r * a[(k + 2, j)];
                a[(k + 2, j)] -= pp * z;
            }
            a[(k + 1, j)] -= pp * y;
            a[(k, j)] -= pp * x;
        }
        for i in l..=hi.min(k + 3) {
            let mut pp = x * a[(i, k)] + y * a[(i, k + 1)];
            if k + 1 != hi {
                pp += z * a[(i, k + 2)];
                a[(i, k + 2)] -= pp * r;
            }
            a[(i, k + 1)] -= pp * q;
            a[(i, k)] -= pp;
        }
    }
}

// ---------------------------------------------------------------------------
// Backward error

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackwardErrorReport {
    /// `min_alpha ||c - alpha c_hat|| / ||c||`.
    #[serde(rename = "B")]
    pub b: f64,
    /// Optimal scaling (its real part when `alpha_complex` is set).
    pub alpha: f64,
    /// Complex optimal scaling, used for complex coefficient vectors.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha_complex: Option<Complex64>,
    pub residual_norm: f64,
    /// `||c||` of the monic-normalized input.
    pub p_norm: f64,
}

/// Relative distance between the monic coefficients of `p` and the best
/// multiple of the coefficients of `prod (x - root)`.
pub fn backward_error<T: Scalar>(p: &ChebSeries<T>, roots: &[Complex64]) -> Result<BackwardErrorReport> {
    let n = p.degree();
    if roots.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: roots.len(),
        });
    }
    let c: Vec<Complex64> = p.monic_normalized()?.coeffs().iter().map(|x| x.to_complex()).collect();
    let p_norm = norm2(&c);
    if n == 0 {
        return Ok(BackwardErrorReport {
            b: 0.0,
            alpha: 1.0,
            alpha_complex: None,
            residual_norm: 0.0,
            p_norm,
        });
    }
    let (series, _) = roots_to_cheb_scaled(roots)?;
    let lead = series.leading();
    let c_hat: Vec<Complex64> = series.coeffs().iter().map(|x| x / lead).collect();
    let inner: Complex64 = c_hat.iter().zip(&c).map(|(h, c)| h.conj() * c).sum();
    let hh: f64 = c_hat.iter().map(|x| x.norm_sqr()).sum();
    let (alpha, alpha_complex) = if T::IS_COMPLEX {
        let a = inner / hh;
        (a, Some(a))
    } else {
        (Complex64::new(inner.re / hh, 0.0), None)
    };
    let residual: Vec<Complex64> = c.iter().zip(&c_hat).map(|(c, h)| c - alpha * h).collect();
    let residual_norm = norm2(&residual);
    Ok(BackwardErrorReport {
        b: residual_norm / p_norm,
        alpha: alpha.re,
        alpha_complex,
        residual_norm,
        p_norm,
    })
}

// ---------------------------------------------------------------------------
// Matching

/// Smallest `t` such that the two multisets can be paired off with every
/// pair at distance at most `t`. Infinite if the sizes differ.
pub fn matched_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let n = a.len();
    if n != b.len() {
        return f64::INFINITY;
    }
    if n == 0 {
        return 0.0;
    }
    // A greedy pairing gives an upper bound; only pairs below it matter.
    let mut used = vec![false; n];
    let mut upper = 0.0f64;
    for x in a {
        let (k, d) = (0..n)
            .filter(|&k| !used[k])
            .map(|k| (k, (x - b[k]).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("unused partner");
        used[k] = true;
        upper = upper.max(d);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| b[i].re.total_cmp(&b[j].re));
    let mut edges: Vec<(f64, usize, usize)> = Vec::new();
    for (i, x) in a.iter().enumerate() {
        let start = order.partition_point(|&k| b[k].re < x.re - upper);
        for &k in &order[start..] {
            if b[k].re > x.re + upper {
                break;
            }
            let d = (x - b[k]).norm();
            if d <= upper {
                edges.push((d, i, k));
            }
        }
    }
    edges.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut cuts: Vec<f64> = edges.iter().map(|e| e.0).collect();
    cuts.dedup();
    let (mut lo, mut hi) = (0usize, cuts.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching(n, &edges, cuts[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    cuts[lo]
}

fn perfect_matching(n: usize, edges: &[(f64, usize, usize)], t: f64) -> bool {
    let mut adj = vec![Vec::new(); n];
    for &(d, i, k) in edges {
        if d > t {
            break;
        }
        adj[i].push(k);
    }
    let mut owner = vec![usize::MAX; n];
    let mut seen = vec![0usize; n];
    for i in 0..n {
        if !augment(i, i + 1, &adj, &mut owner, &mut seen) {
            return false;
        }
    }
    true
}

fn augment(i: usize, stamp: usize, adj: &[Vec<usize>], owner: &mut [usize], seen: &mut [usize]) -> bool {
    let mut stack = vec![(i, 0usize)];
    let mut path: Vec<usize> = Vec::new();
    while let Some(&mut (node, ref mut next)) = stack.last_mut() {
        if *next >= adj[node].len() {
            stack.pop();
            path.pop();
            continue;
        }
        let k = adj[node][*next];
        *next += 1;
        if seen[k] == stamp {
            continue;
        }
        seen[k] = stamp;
        path.push(k);
        if owner[k] == usize::MAX {
            // Flip the alternating path found.
            for (level, &(a, _)) in stack.iter().enumerate() {
                owner[path[level]] = a;
            }
            return true;
        }
        stack.push((owner[k], 0));
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebtech::roots_to_cheb;
    use crate::colleague::{build_colleague, DEFAULT_MONIC_TOL};
    use crate::qrcore::{eigenvalues, eigenvalues_real, SolveOptions};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut xs: Vec<Complex64>) -> Vec<Complex64> {
        xs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        xs
    }

    /// `det(H - z I)` for upper Hessenberg `H` by the leading-minor
    /// recurrence, together with the same recurrence on absolute values.
    fn hessenberg_det<T: Scalar>(h: &Dense<T>, z: Complex64) -> (Complex64, f64) {
        let n = h.dim();
        let at = |i: usize, j: usize| {
            let x = h[(i, j)].to_complex();
            if i == j {
                x - z
            } else {
                x
            }
        };
        let mut p = vec![c(1.0, 0.0)];
        let mut q = vec![1.0];
        for k in 0..n {
            let mut acc = c(0.0, 0.0);
            let mut abs_acc = 0.0;
            let mut prod = c(1.0, 0.0);
            let mut abs_prod = 1.0;
            for i in (0..=k).rev() {
                let sign = if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
                acc += prod * at(i, k) * p[i] * sign;
                abs_acc += abs_prod * at(i, k).norm() * q[i];
                if i > 0 {
                    prod *= at(i, i - 1);
                    abs_prod *= at(i, i - 1).norm();
                }
            }
            p.push(acc);
            q.push(abs_acc);
        }
        (p[n], q[n])
    }

    #[test]
    fn diagonal_matrix() {
        let a = Dense::from_fn(5, |i, j| if i == j { (i + 1) as f64 } else { 0.0 });
        let eig = sorted(dense_hessenberg_qr(&a, &DenseOptions::default()).unwrap());
        for (k, z) in eig.iter().enumerate() {
            assert_eq!(*z, c((k + 1) as f64, 0.0));
        }
    }

    #[test]
    fn symmetric_two_by_two() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = Dense::from_fn(2, |i, j| if i == j { 0.0 } else { h });
        let eig = sorted(dense_hessenberg_qr(&a, &DenseOptions::default()).unwrap());
        assert!((eig[0] - c(-h, 0.0)).norm() < 1e-15);
        assert!((eig[1] - c(h, 0.0)).norm() < 1e-15);
        let eig = sorted(dense_hessenberg_qr(&a.to_complex(), &DenseOptions::default()).unwrap());
        assert!((eig[0] - c(-h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn random_hessenberg_determinant_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..5 {
            let a = Dense::from_fn(16, |i, j| if i <= j + 1 { rng.random_range(-1.0..1.0) } else { 0.0 });
            let eig = dense_hessenberg_qr(&a, &DenseOptions::default()).unwrap();
            let scale = a.frobenius().powi(16);
            for z in &eig {
                let (det, abs_det) = hessenberg_det(&a, *z);
                assert!(det.norm() <= 1e-8 * scale);
                assert!(det.norm() <= 1e-11 * abs_det, "{} vs {}", det.norm(), abs_det);
            }
            let b = Dense::from_fn(16, |i, j| {
                if i <= j + 1 {
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                } else {
                    c(0.0, 0.0)
                }
            });
            for z in dense_hessenberg_qr(&b, &DenseOptions::default()).unwrap() {
                let (det, abs_det) = hessenberg_det(&b, z);
                assert!(det.norm() <= 1e-11 * abs_det);
            }
        }
    }

    #[test]
    fn general_matrix_is_reduced_first() {
        // Permuted upper triangular matrix: eigenvalues are the diagonal.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 9;
        let t = Dense::from_fn(n, |i, j| if i <= j { rng.random_range(-1.0..1.0) } else { 0.0 });
        let perm: Vec<usize> = (0..n).map(|i| (i * 4 + 1) % n).collect();
        let a = Dense::from_fn(n, |i, j| t[(perm[i], perm[j])]);
        assert!(!a.is_upper_hessenberg(0.0));
        let got = dense_hessenberg_qr(&a, &DenseOptions::default()).unwrap();
        let want: Vec<Complex64> = (0..n).map(|i| c(t[(i, i)], 0.0)).collect();
        assert!(matched_distance(&got, &want) < 1e-12);
    }

    #[test]
    fn balancing_keeps_the_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 12;
        let a = Dense::from_fn(n, |i, j| {
            if i <= j + 1 {
                rng.random_range(-1.0..1.0) * 2f64.powi(i as i32 - j as i32)
            } else {
                0.0
            }
        });
        let plain = dense_hessenberg_qr(&a, &DenseOptions::default()).unwrap();
        let opts = DenseOptions {
            balance: true,
            ..Default::default()
        };
        let balanced = dense_hessenberg_qr(&a, &opts).unwrap();
        assert!(matched_distance(&plain, &balanced) < 1e-10);
    }

    #[test]
    fn agrees_with_structured_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        for n in [4, 9, 33, 64] {
            let mut coeffs: Vec<f64> = (0..=n).map(|_| rng.random_range(-1.0..1.0)).collect();
            coeffs[n] = 1.0;
            let p = ChebSeries::new(coeffs);
            let mut g = build_colleague(&p, DEFAULT_MONIC_TOL).unwrap();
            let dense = g.densify().unwrap();
            let norm = dense.frobenius();
            let want = dense_hessenberg_qr(&dense, &DenseOptions::default()).unwrap();
            let got = eigenvalues_real(&mut g, &SolveOptions::default()).unwrap();
            assert!(matched_distance(&got.eigenvalues, &want) <= 1e-10 * norm);
            let mut gc = build_colleague(&p.to_complex(), DEFAULT_MONIC_TOL).unwrap();
            let got = eigenvalues(&mut gc, &SolveOptions::default()).unwrap();
            assert!(matched_distance(&got.eigenvalues, &want) <= 1e-10 * norm);
        }
    }

    #[test]
    fn exact_roots_have_tiny_backward_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for n in [1, 2, 7, 20] {
            let roots: Vec<Complex64> = (0..n).map(|_| c(rng.random_range(-1.0..1.0), 0.0)).collect();
            let p = roots_to_cheb(&roots).unwrap();
            let real = ChebSeries::new(p.coeffs().iter().map(|z| z.re).collect());
            let r = backward_error(&real, &roots).unwrap();
            assert!(r.b <= 1e-12, "n = {n}: {}", r.b);
            assert!(r.alpha_complex.is_none());
            let r = backward_error(&p, &roots).unwrap();
            assert!(r.b <= 1e-12);
            assert!(r.alpha_complex.is_some());
        }
    }

    #[test]
    fn backward_error_is_linear_in_a_perturbation() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let roots: Vec<Complex64> = (0..10).map(|_| c(rng.random_range(-1.0..1.0), 0.0)).collect();
        let p = roots_to_cheb(&roots).unwrap();
        let at = |delta: f64| {
            let mut r = roots.clone();
            r[3] += delta;
            backward_error(&p, &r).unwrap().b
        };
        let (b6, b8) = (at(1e-6), at(1e-8));
        assert!(b6 > 0.0 && b8 > 0.0);
        let ratio = b6 / b8;
        assert!((90.0..110.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn backward_error_is_bounded_and_order_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.random_range(1..15);
            let coeffs: Vec<f64> = (0..=n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let p = ChebSeries::new(coeffs);
            let roots: Vec<Complex64> = (0..n).map(|_| c(rng.random_range(-3.0..3.0), 0.0)).collect();
            let r = backward_error(&p, &roots).unwrap();
            assert!((0.0..=1.0 + 1e-12).contains(&r.b));
            let mut rev = roots.clone();
            rev.reverse();
            let s = backward_error(&p, &rev).unwrap();
            assert!((r.b - s.b).abs() <= 1e-12 * r.b.max(1e-300));
            // A rescaled copy of p gives the same value.
            let scaled = ChebSeries::new(p.coeffs().iter().map(|x| x * 1e5).collect());
            let t = backward_error(&scaled, &roots).unwrap();
            assert!((r.b - t.b).abs() <= 1e-12);
        }
    }

    #[test]
    fn backward_error_rejects_bad_input() {
        let p = ChebSeries::new(vec![1.0, 0.0, 1.0]);
        assert!(matches!(
            backward_error(&p, &[c(0.0, 0.0)]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            backward_error(&p, &[c(0.0, 0.0), c(f64::NAN, 0.0)]),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn matching_distance() {
        let a = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.5)];
        let b = [c(1.0, 0.4), c(0.1, 0.0), c(1.0, 0.1)];
        assert!((matched_distance(&a, &b) - 0.1).abs() < 1e-15);
        assert_eq!(matched_distance(&a, &a), 0.0);
        assert_eq!(matched_distance(&a, &b[..2]), f64::INFINITY);
        // Greedy nearest pairing would give 2 here; the optimum is 1.
        let a = [c(0.0, 0.0), c(1.0, 0.0)];
        let b = [c(1.0, 0.0), c(2.0, 0.0)];
        assert_eq!(matched_distance(&a, &b), 1.0);
    }
}
