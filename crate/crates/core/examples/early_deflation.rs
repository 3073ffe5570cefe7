//! Aggressive early deflation on a trailing window.

use chebqr::bench::random_monic;
use chebqr::colleague::{build_colleague, DEFAULT_MONIC_TOL};
use chebqr::aed::aed_step_complex;
use chebqr::qrcore::{eigenvalues, full_sweep, wilkinson_shift, AedOptions, SolveOptions, StabilityTracker};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let p = random_monic(300, &mut rng).to_complex();
    let g = build_colleague(&p, DEFAULT_MONIC_TOL).unwrap();

    // On a fresh colleague matrix the trailing coupling is 1/2 and nothing can
    // deflate. After a few ordinary sweeps the bottom of the matrix is close
    // to decoupling and a window finds converged eigenvalues well before the
    // subdiagonal entries themselves are negligible.
    let mut warm = g.clone();
    let mut tr = StabilityTracker::new(&warm, 1);
    for _ in 0..12 {
        let plan = wilkinson_shift(&warm).unwrap();
        full_sweep(&mut warm, &plan, &mut tr).unwrap();
    }
    for k in [8, 16, 32] {
        let mut h = warm.clone();
        let r = aed_step_complex(&mut h, k).unwrap();
        println!(
            "window {k:2}: {} deflated, {} shifts returned, spike norm {:.2e}, {} window sweeps",
            r.deflated,
            r.shifts.len(),
            r.spike_norm,
            r.window_sweeps
        );
    }

    // Whole solves with and without it.
    for aed in [AedOptions::disabled(), AedOptions::default()] {
        let opts = SolveOptions { aed, ..Default::default() };
        let r = eigenvalues(&mut g.clone(), &opts).unwrap();
        println!(
            "aed {:5}: {} sweeps, {} AED calls deflating {} eigenvalues",
            aed.enabled, r.iterations, r.aed_calls, r.aed_deflated
        );
    }
}
