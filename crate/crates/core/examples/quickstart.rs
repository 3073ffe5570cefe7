//! Real zeros of a smooth function on [-1, 1].
//!
//! ```text
//! cargo run --example quickstart -- "besselj0(30*x)"
//! ```

use chebqr::expr::parse_expr;
use chebqr::zeros::{zeros_of_expr, ZerosOptions};

fn main() {
    let src = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "exp(x)*sin(40*x) - 0.5".to_string());
    let f = parse_expr(&src).expect("could not parse the expression");
    let report = zeros_of_expr(&f, &ZerosOptions::default()).expect("rootfinding failed");

    println!("f(x) = {f}");
    print!("{}", report.to_text());
    for r in &report.real_roots {
        assert!(f.eval(*r).abs() < 1e-10, "f({r}) = {}", f.eval(*r));
    }
}
