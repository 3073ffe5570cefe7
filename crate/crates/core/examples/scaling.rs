//! Cost against degree on random polynomials: time should grow like n^2 and
//! sweeps like a small multiple of n.
//!
//! ```text
//! cargo run --release --example scaling -- 256 512 1024 2048
//! ```

use chebqr::bench::bench_degree;
use chebqr::qrcore::SolveOptions;
use chebqr::zeros::SolverMode;

fn main() {
    let mut degrees: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if degrees.is_empty() {
        degrees = vec![64, 128, 256, 512];
    }
    let opts = SolveOptions::default();
    println!("{:>6} {:>10} {:>9} {:>8} {:>9}", "n", "seconds", "sweeps/n", "ratio", "B");
    let mut prev: Option<f64> = None;
    for n in degrees {
        let row = bench_degree(n, SolverMode::Single, 1, 3, &opts, 1).unwrap();
        let ratio = prev.map(|p| row.seconds / p).unwrap_or(f64::NAN);
        println!("{n:>6} {:>10.4} {:>9.2} {ratio:>8.2} {:>9.1e}", row.seconds, row.sweeps_per_degree, row.b);
        prev = Some(row.seconds);
    }
}
