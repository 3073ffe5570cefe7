//! The colleague matrix of a Chebyshev series and its O(n) generator form.
//!
//! A degree-n series gives an n x n upper Hessenberg matrix that is a
//! Hermitian matrix plus the rank-one term `u v^H`. Only the diagonal `d`,
//! the subdiagonal `beta` and the vectors `u`, `v` are stored.

use chebqr::chebtech::ChebSeries;
use chebqr::colleague::{build_colleague, DEFAULT_MONIC_TOL};

fn main() {
    // p(x) = T_4(x) - 0.5 T_1(x) + 0.25
    let p = ChebSeries::new(vec![0.25, -0.5, 0.0, 0.0, 1.0]);
    let g = build_colleague(&p, DEFAULT_MONIC_TOL).unwrap();
    println!("d    = {:?}", g.d());
    println!("beta = {:?}", g.beta());
    println!("u    = {:?}", g.u());
    println!("v    = {:?}", g.v());

    let a = g.densify().unwrap();
    println!("dense form:");
    for i in 0..a.dim() {
        let row: Vec<String> = (0..a.dim()).map(|j| format!("{:8.4}", a[(i, j)])).collect();
        println!("  [{}]", row.join(" "));
    }

    // F = A - u v^T is symmetric.
    let n = a.dim();
    let mut asym: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let fij = a[(i, j)] - g.u()[i] * g.v()[j];
            let fji = a[(j, i)] - g.u()[j] * g.v()[i];
            asym = asym.max((fij - fji).abs());
        }
    }
    println!("max |F - F^T| = {asym:.1e}");
    assert!(asym < 1e-15);
    assert!(a.is_upper_hessenberg(0.0));
}
