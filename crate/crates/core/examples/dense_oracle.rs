//! Structured solver against a textbook dense Hessenberg QR, with and
//! without balancing.

use chebqr::chebtech::adapt_interpolate;
use chebqr::colleague::{build_colleague, DEFAULT_MONIC_TOL};
use chebqr::oracle::{backward_error, dense_hessenberg_qr, matched_distance, DenseOptions};
use chebqr::qrcore::{eigenvalues_real, SolveOptions};

fn main() {
    let p = adapt_interpolate(|x| x.exp() * (300.0 * x).sin(), 1e-14).unwrap();
    let monic = p.monic_normalized().unwrap();
    let mut g = build_colleague(&p, DEFAULT_MONIC_TOL).unwrap();
    let dense = g.densify().unwrap();
    println!("degree {}, ||A||_F = {:.2e}", p.degree(), dense.frobenius());

    let structured = eigenvalues_real(&mut g, &SolveOptions::default()).unwrap().eigenvalues;
    println!("structured          B = {:.2e}", backward_error(&monic, &structured).unwrap().b);
    for balance in [false, true] {
        let eig = dense_hessenberg_qr(&dense, &DenseOptions { balance, ..Default::default() }).unwrap();
        println!(
            "dense, balance {balance:5} B = {:.2e}   distance to structured {:.2e}",
            backward_error(&monic, &eig).unwrap().b,
            matched_distance(&eig, &structured)
        );
    }
}
