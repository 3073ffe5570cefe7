//! Backward errors and stability estimates for a few test functions, in the
//! style of a results table: degree, gamma_hat, B and run time per row.

use std::time::Instant;

use chebqr::expr::parse_expr;
use chebqr::zeros::{zeros_of_expr, ZerosOptions};

fn main() {
    let rows = [
        "exp(x)*sin(800*x)",
        "besselj0(100*x)",
        "cos(1000*x^2)",
        "sin(1/(x^2 + 1/100))",
        "sinh(5*x) - cosh(x)",
    ];
    println!("{:<24} {:>6} {:>10} {:>10} {:>7} {:>9}", "f(x)", "n", "gamma_1", "B", "roots", "time");
    for src in rows {
        let f = parse_expr(src).expect("valid expression");
        let t = Instant::now();
        let r = zeros_of_expr(&f, &ZerosOptions::default()).expect("solve");
        println!(
            "{:<24} {:>6} {:>10.2e} {:>10.2e} {:>7} {:>8.0?}",
            src,
            r.degree,
            r.gamma_hat,
            r.b,
            r.real_roots.len(),
            t.elapsed()
        );
    }
}
