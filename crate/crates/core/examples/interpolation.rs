//! Chebyshev interpolation: samples at Chebyshev points, coefficients via the
//! DCT, evaluation with Clenshaw's recurrence and the adaptive degree choice.

use chebqr::chebtech::{adapt_interpolate, cheb_points, clenshaw, format_coefficients, parse_coefficients, values_to_coeffs, Coefficients};

fn main() {
    // Fixed degree: interpolate 1/(1 + 25x^2) at 65 points.
    let runge = |x: f64| 1.0 / (1.0 + 25.0 * x * x);
    let grid = cheb_points(64);
    let values: Vec<f64> = grid.points.iter().map(|&x| runge(x)).collect();
    let p = values_to_coeffs(&values).unwrap();
    let worst = (0..=1000)
        .map(|i| -1.0 + i as f64 / 500.0)
        .map(|x| (clenshaw(p.coeffs(), x) - runge(x)).abs())
        .fold(0.0, f64::max);
    println!("degree 64 interpolant of the Runge function: max error {worst:.2e}");

    // Adaptive degree: double until the coefficient tail reaches the tolerance.
    for (name, f) in [
        ("exp(x)", (|x: f64| x.exp()) as fn(f64) -> f64),
        ("runge", runge),
        ("sin(100x)", |x: f64| (100.0 * x).sin()),
        ("|x|^3", |x: f64| x.abs().powi(3)),
    ] {
        match adapt_interpolate(f, 1e-14) {
            Ok(p) => println!("{name:>10}: degree {:5}, |c_n| = {:.1e}", p.degree(), p.leading().abs()),
            Err(e) => println!("{name:>10}: {e}"),
        }
    }

    // Coefficients round-trip through the text format used by `chebqr --coeffs`.
    let p = adapt_interpolate(|x| (3.0 * x).cos(), 1e-14).unwrap();
    let text = format_coefficients(&p);
    let Coefficients::Real(back) = parse_coefficients(&text, "inline").unwrap() else {
        unreachable!()
    };
    assert_eq!(back.degree(), p.degree());
    println!("cos(3x) in {} coefficients, first line of file: {:?}", p.coeffs().len(), text.lines().next().unwrap());
}
