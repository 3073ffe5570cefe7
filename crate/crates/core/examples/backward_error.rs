//! Backward error of a set of approximate roots.
//!
//! B measures how far the monic polynomial vanishing at the computed roots is
//! from the input, relative to the input's size, after the best rescaling.

use chebqr::chebtech::{roots_to_cheb, ChebSeries};
use chebqr::oracle::backward_error;
use chebqr::scalar::Complex64;

fn main() {
    let roots: Vec<Complex64> = [-0.9, -0.3, 0.2, 0.7]
        .iter()
        .map(|&r| Complex64::new(r, 0.0))
        .chain([Complex64::new(0.1, 0.4), Complex64::new(0.1, -0.4)])
        .collect();
    let p: ChebSeries<f64> = ChebSeries::new(roots_to_cheb(&roots).unwrap().coeffs().iter().map(|c| c.re).collect());

    for delta in [0.0, 1e-14, 1e-10, 1e-6, 1e-2] {
        let perturbed: Vec<Complex64> = roots.iter().map(|r| r + delta * r.re).collect();
        let rep = backward_error(&p, &perturbed).unwrap();
        println!("roots moved by {delta:7.0e}: B = {:.2e} (scale alpha = {:.6})", rep.b, rep.alpha);
    }
}
