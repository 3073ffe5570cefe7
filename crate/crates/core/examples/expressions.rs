//! The expression language accepted by `chebqr zeros`.

use chebqr::expr::{bessel_j0, parse_expr};

fn main() {
    for src in [
        "2^3^2",
        "-x^2",
        "exp(x)*sin(800*x)",
        "besselj0(100*x) + cosh(x)/e",
        "sqrt(abs(x)) - log(2 + x) * tan(pi/8)",
    ] {
        let e = parse_expr(src).unwrap();
        let again = parse_expr(&e.to_string()).unwrap();
        assert_eq!(again.to_string(), e.to_string());
        println!("{src:<40} -> {e:<45} f(0.3) = {:+.15}", e.eval(0.3));
    }

    for bad in ["sin(x", "x + * 2", "foo(x)"] {
        let err = parse_expr(bad).unwrap_err();
        println!("{bad:<10} error at byte {}: {err}", err.offset);
    }

    println!("J0(2.404825557695773) = {:.2e}", bessel_j0(2.404825557695773));
}
