//! Timing runs on random polynomials with standard normal coefficients.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::chebtech::ChebSeries;
use crate::colleague::{build_colleague, DEFAULT_MONIC_TOL};
use crate::error::Result;
use crate::oracle::backward_error;
use crate::parchase::{parallel_eigenvalues, parallel_eigenvalues_real};
use crate::qrcore::{RootReport, SolveOptions};
use crate::zeros::SolverMode;

/// Degree-`n` series with independent standard normal coefficients and a
/// unit leading coefficient.
pub fn random_monic(n: usize, rng: &mut impl rand::Rng) -> ChebSeries<f64> {
    let mut c: Vec<f64> = (0..=n).map(|_| StandardNormal.sample(rng)).collect();
    c[n] = 1.0;
    ChebSeries::new(c)
}

/// Builds the colleague matrix of `p` and solves it with the given mode and
/// worker count.
pub fn solve_series(
    p: &ChebSeries<f64>,
    mode: SolverMode,
    workers: usize,
    opts: &SolveOptions,
) -> Result<RootReport> {
    match mode {
        SolverMode::Single => {
            let mut g = build_colleague(&p.to_complex(), DEFAULT_MONIC_TOL)?;
            parallel_eigenvalues(&mut g, workers, opts)
        }
        SolverMode::Double => {
            let mut g = build_colleague(p, DEFAULT_MONIC_TOL)?;
            parallel_eigenvalues_real(&mut g, workers, opts)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub degree: usize,
    pub mode: SolverMode,
    pub workers: usize,
    pub aed: bool,
    pub repeats: usize,
    /// Mean wall-clock seconds per solve.
    pub seconds: f64,
    /// Mean main-loop sweeps per solve.
    pub sweeps: f64,
    pub sweeps_per_degree: f64,
    pub gamma_hat: f64,
    #[serde(rename = "B")]
    pub b: f64,
}

/// Solves `repeats` random instances of degree `n` and averages the cost.
/// `gamma_hat` and `B` are the worst values seen.
pub fn bench_degree(
    n: usize,
    mode: SolverMode,
    workers: usize,
    repeats: usize,
    opts: &SolveOptions,
    seed: u64,
) -> Result<BenchRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
    let repeats = repeats.max(1);
    let mut elapsed = Duration::ZERO;
    let mut sweeps = 0usize;
    let mut gamma: f64 = 0.0;
    let mut b: f64 = 0.0;
    for _ in 0..repeats {
        let p = random_monic(n, &mut rng);
        let t = Instant::now();
        let r = solve_series(&p, mode, workers, opts)?;
        elapsed += t.elapsed();
        sweeps += r.iterations;
        gamma = gamma.max(r.gamma_hat);
        b = b.max(backward_error(&p, &r.eigenvalues)?.b);
    }
    let k = repeats as f64;
    Ok(BenchRow {
        degree: n,
        mode,
        workers,
        aed: opts.aed.enabled,
        repeats,
        seconds: elapsed.as_secs_f64() / k,
        sweeps: sweeps as f64 / k,
        sweeps_per_degree: sweeps as f64 / k / n as f64,
        gamma_hat: gamma,
        b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_monic_is_reproducible() {
        let a = random_monic(10, &mut ChaCha8Rng::seed_from_u64(3));
        let b = random_monic(10, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
        assert_eq!(a.leading(), 1.0);
    }

    #[test]
    fn small_bench_row() {
        let row = bench_degree(40, SolverMode::Single, 1, 2, &SolveOptions::default(), 1).unwrap();
        assert_eq!(row.degree, 40);
        assert!(row.b < 1e-12);
        assert!(row.sweeps >= 40.0);
    }
}
