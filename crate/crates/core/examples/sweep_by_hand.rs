//! One QR sweep, one chasing step at a time.
//!
//! `begin_sweep` applies the shifted first rotation and leaves a bulge below
//! the subdiagonal; every `chase_step` pushes it one row down until it falls
//! off the bottom. `deflation_scan` then looks for negligible subdiagonal
//! entries.

use chebqr::chebtech::ChebSeries;
use chebqr::colleague::{build_colleague, DEFAULT_MONIC_TOL};
use chebqr::qrcore::{begin_sweep, chase_step, deflation_scan, wilkinson_shift, StabilityTracker};
use chebqr::scalar::Complex64;

fn main() {
    let p = ChebSeries::new(vec![0.3, -0.2, 0.5, 0.1, -0.7, 0.05, 1.0]).to_complex();
    let mut g = build_colleague(&p, DEFAULT_MONIC_TOL).unwrap();
    let mut tr = StabilityTracker::new(&g, 1);

    for sweep in 1..=12 {
        let plan = wilkinson_shift(&g).unwrap();
        let first = begin_sweep(&mut g, &plan, &mut tr).unwrap();
        if sweep == 1 {
            println!("first rotation acts on rows {}..{}", first[0].row, first[0].row + 1);
            for e in g.bulge() {
                println!("  bulge entry ({}, {}) = {:.3e}", e.row, e.col, e.value.norm());
            }
        }
        let mut steps = 0;
        while chase_step(&mut g, &mut tr).is_some() {
            steps += 1;
        }
        let hits = deflation_scan(&mut g, f64::EPSILON);
        let (lo, hi) = g.active();
        let last = g.beta()[g.dim() - 2].norm();
        println!("sweep {sweep:2}: {steps} chasing steps, |beta_last| = {last:.2e}, active {lo}..={hi}, deflated at {hits:?}");
        if hi <= lo + 1 {
            break;
        }
    }
    let corner: Complex64 = g.d()[g.dim() - 1];
    println!("converged corner eigenvalue: {corner:.15}");
    println!("gamma_hat so far: {:.3}", tr.gamma_hat());
}
