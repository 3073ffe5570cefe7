//! Real zeros of a smooth function on [-1, 1]: interpolate at Chebyshev
//! points, build the colleague matrix of the interpolant, compute its
//! eigenvalues and keep the real ones inside the interval.

use serde::{Deserialize, Serialize};

use crate::chebtech::{adapt_interpolate, clenshaw, ChebSeries, Coefficients};
use crate::colleague::{build_colleague, DEFAULT_MONIC_TOL};
use crate::error::Result;
use crate::expr::Expr;
use crate::oracle::backward_error;
use crate::parchase::{parallel_eigenvalues, parallel_eigenvalues_real};
use crate::qrcore::{RootReport, SolveOptions, TraceEvent};
use crate::scalar::{Complex64, Scalar};

pub const SCHEMA: &str = "chebqr.zeros/1";

/// Arithmetic of the eigenvalue solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverMode {
    /// Complex single-shift sweeps.
    #[default]
    Single,
    /// Real double-shift sweeps (real coefficients only).
    Double,
}

impl std::str::FromStr for SolverMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "single" => Ok(SolverMode::Single),
            "double" => Ok(SolverMode::Double),
            other => Err(format!("unknown mode `{other}` (expected single or double)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Ok,
    Suspect,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZerosOptions {
    /// Relative tolerance of the adaptive interpolation.
    pub tol: f64,
    pub mode: SolverMode,
    pub workers: usize,
    pub solve: SolveOptions,
    /// Largest `|Im z| / max(1, |z|)` of an eigenvalue reported as real.
    pub tol_im: f64,
    /// Allowed overshoot of `Re z` past +-1, relative to `max(1, |z|)`.
    pub tol_edge: f64,
    /// `gamma_hat` above which the result is flagged `suspect`.
    pub suspect_threshold: f64,
    /// Include every eigenvalue in the report.
    pub all_eigenvalues: bool,
}

impl Default for ZerosOptions {
    fn default() -> Self {
        ZerosOptions {
            tol: 1e-14,
            mode: SolverMode::Single,
            workers: 1,
            solve: SolveOptions::default(),
            tol_im: 1e-8,
            tol_edge: 1e-8,
            suspect_threshold: 1e4,
            all_eigenvalues: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZerosReport {
    pub schema: String,
    /// Real zeros in [-1, 1], ascending, without duplicates.
    pub real_roots: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub all_eigenvalues: Option<Vec<Complex64>>,
    pub degree: usize,
    pub mode: SolverMode,
    pub workers: usize,
    pub gamma_hat: f64,
    /// Window parameter `j` of `gamma_hat`.
    pub gamma_j: usize,
    pub stability: Stability,
    /// Backward error of all eigenvalues against the monic interpolant.
    #[serde(rename = "B")]
    pub b: f64,
    pub iterations: usize,
    pub aed_sweeps: usize,
    /// `||c||` of the monic-normalized interpolant.
    pub p_norm: f64,
    /// Largest `|p(r)| / sum |c_k|` over the reported roots.
    pub max_residual: f64,
    pub diagnostics: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub trace: Vec<TraceEvent>,
}

impl ZerosReport {
    /// Two-column CSV of the real roots.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,root\n");
        for (i, r) in self.real_roots.iter().enumerate() {
            out.push_str(&format!("{},{:.17e}\n", i, r));
        }
        out
    }

    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "degree {}  roots in [-1, 1]: {}\n",
            self.degree,
            self.real_roots.len()
        ));
        for r in &self.real_roots {
            out.push_str(&format!("  {:+.16e}\n", r));
        }
        out.push_str(&format!(
            "gamma_hat_{} = {:.3e}  stability: {}\n",
            self.gamma_j,
            self.gamma_hat,
            match self.stability {
                Stability::Ok => "ok",
                Stability::Suspect => "suspect",
            }
        ));
        out.push_str(&format!(
            "B = {:.3e}  sweeps = {}  ||p|| = {:.3e}\n",
            self.b, self.iterations, self.p_norm
        ));
        if let Some(all) = &self.all_eigenvalues {
            out.push_str("eigenvalues:\n");
            for z in all {
                out.push_str(&format!("  {:+.16e} {:+.16e}i\n", z.re, z.im));
            }
        }
        for d in &self.diagnostics {
            out.push_str(&format!("note: {d}\n"));
        }
        out
    }
}

/// Zeros of `f` on [-1, 1].
pub fn zeros_of_expr(f: &Expr, opts: &ZerosOptions) -> Result<ZerosReport> {
    let p = adapt_interpolate(|x| f.eval(x), opts.tol)?;
    zeros_of_series(&Coefficients::Real(p), opts)
}

/// Zeros on [-1, 1] of a polynomial given by Chebyshev coefficients.
pub fn zeros_of_series(p: &Coefficients, opts: &ZerosOptions) -> Result<ZerosReport> {
    match p {
        Coefficients::Real(p) => pipeline(p, opts),
        Coefficients::Complex(p) => pipeline(p, opts),
    }
}

fn pipeline<T: Scalar>(p: &ChebSeries<T>, opts: &ZerosOptions) -> Result<ZerosReport> {
    let mut diagnostics = Vec::new();
    let p = strip_zero_tail(p);
    let degree = p.degree();
    let mode = if T::IS_COMPLEX && opts.mode == SolverMode::Double {
        diagnostics.push("complex coefficients: using single-shift arithmetic".to_string());
        SolverMode::Single
    } else {
        opts.mode
    };
    let mut report = ZerosReport {
        schema: SCHEMA.to_string(),
        real_roots: Vec::new(),
        all_eigenvalues: None,
        degree,
        mode,
        workers: opts.workers,
        gamma_hat: 0.0,
        gamma_j: if mode == SolverMode::Double { 2 } else { 1 },
        stability: Stability::Ok,
        b: 0.0,
        iterations: 0,
        aed_sweeps: 0,
        p_norm: 0.0,
        max_residual: 0.0,
        diagnostics,
        trace: Vec::new(),
    };
    if degree == 0 {
        let what = if p.leading().is_zero() {
            "function is identically zero on the grid; no isolated roots"
        } else {
            "constant function: no roots"
        };
        report.diagnostics.push(what.to_string());
        return Ok(report);
    }
    let monic = p.monic_normalized()?;
    let eig = if degree == 1 {
        let c = monic.coeffs();
        vec![-c[0].to_complex()]
    } else {
        let solved = solve(&p, mode, opts)?;
        report.gamma_hat = solved.gamma_hat;
        report.iterations = solved.iterations;
        report.aed_sweeps = solved.aed_sweeps;
        report.trace = solved.trace;
        solved.eigenvalues
    };
    let be = backward_error(&monic, &eig)?;
    report.b = be.b;
    report.p_norm = be.p_norm;
    if report.gamma_hat > opts.suspect_threshold {
        report.stability = Stability::Suspect;
        report.diagnostics.push(format!(
            "gamma_hat = {:.2e} exceeds {:.0e}: the roots may not be backward stable",
            report.gamma_hat, opts.suspect_threshold
        ));
    }
    report.real_roots = filter_real(&eig, opts.tol_im, opts.tol_edge);
    let scale: f64 = p.coeffs().iter().map(|c| c.abs()).sum();
    report.max_residual = report
        .real_roots
        .iter()
        .map(|&r| clenshaw(p.coeffs(), T::from_real(r)).abs() / scale)
        .fold(0.0, f64::max);
    if opts.all_eigenvalues {
        report.all_eigenvalues = Some(eig);
    }
    Ok(report)
}

/// Drops exactly zero leading coefficients.
fn strip_zero_tail<T: Scalar>(p: &ChebSeries<T>) -> ChebSeries<T> {
    let c = p.coeffs();
    let n = c.iter().rposition(|x| !x.is_zero()).unwrap_or(0);
    ChebSeries::new(c[..=n].to_vec())
}

fn solve<T: Scalar>(p: &ChebSeries<T>, mode: SolverMode, opts: &ZerosOptions) -> Result<RootReport> {
    let workers = opts.workers.max(1);
    match mode {
        SolverMode::Double => {
            let real = ChebSeries::new(p.coeffs().iter().map(|c| c.re()).collect());
            let mut g = build_colleague(&real, DEFAULT_MONIC_TOL)?;
            parallel_eigenvalues_real(&mut g, workers, &opts.solve)
        }
        SolverMode::Single => {
            let mut g = build_colleague(&p.to_complex(), DEFAULT_MONIC_TOL)?;
            parallel_eigenvalues(&mut g, workers, &opts.solve)
        }
    }
}

/// Eigenvalues within the tolerances of the real segment [-1, 1], projected
/// onto it, sorted and deduplicated.
pub fn filter_real(eig: &[Complex64], tol_im: f64, tol_edge: f64) -> Vec<f64> {
    let mut out: Vec<f64> = eig
        .iter()
        .filter(|z| {
            let s = z.norm().max(1.0);
            z.im.abs() <= tol_im * s && z.re.abs() <= 1.0 + tol_edge * s
        })
        .map(|z| z.re.clamp(-1.0, 1.0))
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= tol_im * a.abs().max(1.0));
    out
}
