//! The computable stability estimate gamma_hat.
//!
//! The backward error of the computed roots is bounded by a multiple of the
//! largest windowed product `||u_window|| * ||v_window||` seen during the
//! iteration. A solve tracks this running maximum incrementally; this example
//! compares it with the backward error actually achieved.

use chebqr::chebtech::adapt_interpolate;
use chebqr::colleague::{build_colleague, DEFAULT_MONIC_TOL};
use chebqr::oracle::backward_error;
use chebqr::qrcore::{eigenvalues, gamma_j, SolveOptions};

fn main() {
    let cases: [(&str, fn(f64) -> f64); 3] = [
        ("cos(50x)", |x| (50.0 * x).cos()),
        ("1/(1+400x^2) - 0.5", |x| 1.0 / (1.0 + 400.0 * x * x) - 0.5),
        ("sin(1/(x^2+0.01))", |x| (1.0 / (x * x + 0.01)).sin()),
    ];
    println!("{:<20} {:>6} {:>12} {:>12} {:>10}", "f", "n", "gamma(A0)", "gamma_hat", "B");
    for (name, f) in cases {
        let p = adapt_interpolate(f, 1e-14).unwrap().to_complex();
        let mut g = build_colleague(&p, DEFAULT_MONIC_TOL).unwrap();
        let initial = gamma_j(g.u(), g.v(), 1);
        let r = eigenvalues(&mut g, &SolveOptions::default()).unwrap();
        let b = backward_error(&p.monic_normalized().unwrap(), &r.eigenvalues).unwrap().b;
        println!(
            "{name:<20} {:>6} {initial:>12.3e} {:>12.3e} {b:>10.2e}",
            p.degree(),
            r.gamma_hat
        );
    }
}
