//! The `chebqr` command line.
//!
//! ```text
//! chebqr zeros <EXPR> [--tol T] [--workers N] [--mode single|double] [--json | --csv]
//! chebqr zeros --coeffs FILE [...]
//! chebqr eig --coeffs FILE [--all] [--json]
//! chebqr bench --degrees 256,512 [--workers N] [--no-aed] [--repeats R] [--json]
//! ```
//!
//! Exit codes: 0 success, 1 other failure, 2 usage or expression parse
//! error, 3 no convergence, 4 unreadable or malformed coefficient file.
//! `CHEBQR_SEED` seeds the exceptional shifts and the benchmark polynomials.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bench::bench_degree;
use crate::chebtech::{read_coefficients, Coefficients};
use crate::colleague::{build_colleague, DEFAULT_MONIC_TOL};
use crate::error::Error;
use crate::expr::parse_expr;
use crate::oracle::backward_error;
use crate::parchase::{parallel_eigenvalues, parallel_eigenvalues_real};
use crate::qrcore::{AedOptions, Deflation, RootReport, SolveOptions};
use crate::scalar::Complex64;
use crate::zeros::{zeros_of_expr, zeros_of_series, SolverMode, ZerosOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const EXIT_BAD_INPUT: i32 = 4;

pub const SEED_VAR: &str = "CHEBQR_SEED";
pub const EIG_SCHEMA: &str = "chebqr.eig/1";

#[derive(Parser, Debug)]
#[command(name = "chebqr", version, about = "Roots of Chebyshev series via structured QR on the colleague matrix")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Real zeros in [-1, 1] of an expression in x or of a coefficient file.
    Zeros(ZerosArgs),
    /// Eigenvalues of the colleague matrix of a coefficient file.
    Eig(EigArgs),
    /// Time random polynomials of the given degrees.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct SolverArgs {
    /// Bulge-chasing threads (1 = sequential).
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// single (complex shifts) or double (real Francis shifts).
    #[arg(long, default_value = "single")]
    mode: SolverMode,
    /// Disable aggressive early deflation.
    #[arg(long)]
    no_aed: bool,
    /// Print one JSON line per sweep to stderr.
    #[arg(long)]
    trace: bool,
}

#[derive(Args, Debug)]
struct ZerosArgs {
    /// Function of x, e.g. "exp(x)*sin(800*x)".
    #[arg(required_unless_present = "coeffs", conflicts_with = "coeffs")]
    expr: Option<String>,
    /// Chebyshev coefficient file (one value, or `re im`, per line).
    #[arg(long)]
    coeffs: Option<PathBuf>,
    /// Relative tolerance of the adaptive interpolation.
    #[arg(long, default_value_t = 1e-14)]
    tol: f64,
    /// gamma_hat above which the result is reported as suspect.
    #[arg(long, default_value_t = 1e4)]
    suspect_threshold: f64,
    /// Also report every eigenvalue.
    #[arg(long)]
    all: bool,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct EigArgs {
    #[arg(long)]
    coeffs: PathBuf,
    /// List every eigenvalue, not only the summary.
    #[arg(long)]
    all: bool,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    degrees: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Serialize)]
struct EigReport {
    schema: &'static str,
    degree: usize,
    mode: SolverMode,
    workers: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    eigenvalues: Option<Vec<Complex64>>,
    gamma_hat: f64,
    gamma_j: usize,
    #[serde(rename = "B")]
    b: f64,
    iterations: usize,
    aed_sweeps: usize,
    aed_calls: usize,
    aed_deflated: usize,
    /// 1-based positions at which eigenvalues split off.
    deflations: Vec<Deflation>,
}

/// Runs the command line with `args` (including the program name) and
/// returns the process exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let seed = match std::env::var(SEED_VAR) {
        Ok(s) => match s.trim().parse::<u64>() {
            Ok(v) => Some(v),
            Err(_) => {
                let _ = writeln!(err, "error: {SEED_VAR} must be an unsigned integer, got `{s}`");
                return EXIT_PARSE;
            }
        },
        Err(_) => None,
    };
    let result = match cli.command {
        Command::Zeros(a) => zeros_cmd(a, seed, out, err),
        Command::Eig(a) => eig_cmd(a, seed, out, err),
        Command::Bench(a) => bench_cmd(a, seed, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => EXIT_PARSE,
        Error::NoConvergence(_) => EXIT_NO_CONVERGENCE,
        Error::BadCoefficientFile { .. } => EXIT_BAD_INPUT,
        _ => EXIT_FAILURE,
    }
}

fn solve_options(s: &SolverArgs, seed: Option<u64>) -> SolveOptions {
    let mut opts = SolveOptions {
        trace: s.trace,
        ..Default::default()
    };
    if s.no_aed {
        opts.aed = AedOptions::disabled();
    }
    if let Some(seed) = seed {
        opts.seed = seed;
    }
    opts
}

fn emit_trace<T: Serialize>(events: &[T], err: &mut dyn Write) -> Result<(), Error> {
    for ev in events {
        writeln!(err, "{}", serde_json::to_string(ev).expect("trace events serialize"))?;
    }
    Ok(())
}

fn zeros_cmd(a: ZerosArgs, seed: Option<u64>, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Error> {
    let opts = ZerosOptions {
        tol: a.tol,
        mode: a.solver.mode,
        workers: a.solver.workers,
        solve: solve_options(&a.solver, seed),
        suspect_threshold: a.suspect_threshold,
        all_eigenvalues: a.all,
        ..Default::default()
    };
    let report = match (&a.expr, &a.coeffs) {
        (_, Some(path)) => zeros_of_series(&read_coefficients(path)?, &opts)?,
        (Some(src), None) => zeros_of_expr(&parse_expr(src)?, &opts)?,
        (None, None) => unreachable!("clap requires an expression or --coeffs"),
    };
    emit_trace(&report.trace, err)?;
    if a.json {
        let mut v = serde_json::to_value(&report).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("trace");
        }
        writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"))?;
    } else if a.csv {
        out.write_all(report.to_csv().as_bytes())?;
    } else {
        out.write_all(report.to_text().as_bytes())?;
    }
    Ok(())
}

fn eig_cmd(a: EigArgs, seed: Option<u64>, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Error> {
    let opts = solve_options(&a.solver, seed);
    let coeffs = read_coefficients(&a.coeffs)?;
    let degree = coeffs.degree();
    let (mode, solved, b): (SolverMode, RootReport, f64) = match (&coeffs, a.solver.mode) {
        (Coefficients::Real(p), SolverMode::Double) => {
            let mut g = build_colleague(p, DEFAULT_MONIC_TOL)?;
            let r = parallel_eigenvalues_real(&mut g, a.solver.workers, &opts)?;
            let b = backward_error(&p.monic_normalized()?, &r.eigenvalues)?.b;
            (SolverMode::Double, r, b)
        }
        (Coefficients::Real(p), SolverMode::Single) => {
            let p = p.to_complex();
            let mut g = build_colleague(&p, DEFAULT_MONIC_TOL)?;
            let r = parallel_eigenvalues(&mut g, a.solver.workers, &opts)?;
            let b = backward_error(&p.monic_normalized()?, &r.eigenvalues)?.b;
            (SolverMode::Single, r, b)
        }
        (Coefficients::Complex(p), _) => {
            let mut g = build_colleague(p, DEFAULT_MONIC_TOL)?;
            let r = parallel_eigenvalues(&mut g, a.solver.workers, &opts)?;
            let b = backward_error(&p.monic_normalized()?, &r.eigenvalues)?.b;
            (SolverMode::Single, r, b)
        }
    };
    emit_trace(&solved.trace, err)?;
    let report = EigReport {
        schema: EIG_SCHEMA,
        degree,
        mode,
        workers: a.solver.workers,
        eigenvalues: a.all.then(|| solved.eigenvalues.clone()),
        gamma_hat: solved.gamma_hat,
        gamma_j: solved.gamma_j,
        b,
        iterations: solved.iterations,
        aed_sweeps: solved.aed_sweeps,
        aed_calls: solved.aed_calls,
        aed_deflated: solved.aed_deflated,
        deflations: solved.deflations.clone(),
    };
    if a.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("json"))?;
        return Ok(());
    }
    writeln!(out, "degree {degree}  mode {mode:?}  workers {}", a.solver.workers)?;
    writeln!(
        out,
        "gamma_hat_{} = {:.3e}  B = {:.3e}  sweeps = {} (+{} in {} AED windows, {} deflated early)",
        report.gamma_j, report.gamma_hat, b, report.iterations, report.aed_sweeps, report.aed_calls, report.aed_deflated
    )?;
    if let Some(eig) = &report.eigenvalues {
        for z in eig {
            writeln!(out, "{:+.16e} {:+.16e}", z.re, z.im)?;
        }
    }
    Ok(())
}

fn bench_cmd(a: BenchArgs, seed: Option<u64>, out: &mut dyn Write) -> Result<(), Error> {
    let opts = solve_options(&a.solver, seed);
    let seed = seed.unwrap_or(opts.seed);
    if !a.json {
        writeln!(
            out,
            "{:>7} {:>11} {:>9} {:>8} {:>10} {:>10}",
            "degree", "seconds", "sweeps", "sweeps/n", "gamma_hat", "B"
        )?;
    }
    for &n in &a.degrees {
        if n < 2 {
            return Err(Error::DegreeTooSmall { degree: n, min: 2 });
        }
        let row = bench_degree(n, a.solver.mode, a.solver.workers, a.repeats, &opts, seed)?;
        if a.json {
            writeln!(out, "{}", serde_json::to_string(&row).expect("json"))?;
        } else {
            writeln!(
                out,
                "{:>7} {:>11.6} {:>9.1} {:>8.2} {:>10.2e} {:>10.2e}",
                row.degree, row.seconds, row.sweeps, row.sweeps_per_degree, row.gamma_hat, row.b
            )?;
        }
    }
    Ok(())
}
