//! Real coefficients: double-shift sweeps in real arithmetic against
//! single-shift sweeps in complex arithmetic.

use std::time::Instant;

use chebqr::bench::random_monic;
use chebqr::colleague::{build_colleague, DEFAULT_MONIC_TOL};
use chebqr::oracle::matched_distance;
use chebqr::qrcore::{eigenvalues, eigenvalues_real, SolveOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = random_monic(800, &mut rng);
    let opts = SolveOptions::default();

    let t = Instant::now();
    let real = eigenvalues_real(&mut build_colleague(&p, DEFAULT_MONIC_TOL).unwrap(), &opts).unwrap();
    let t_real = t.elapsed();
    let t = Instant::now();
    let complex = eigenvalues(&mut build_colleague(&p.to_complex(), DEFAULT_MONIC_TOL).unwrap(), &opts).unwrap();
    let t_complex = t.elapsed();

    println!("double shift: {t_real:.2?}, {} sweeps, gamma_hat_2 = {:.2}", real.iterations, real.gamma_hat);
    println!("single shift: {t_complex:.2?}, {} sweeps, gamma_hat_1 = {:.2}", complex.iterations, complex.gamma_hat);
    println!("distance between the two spectra: {:.2e}", matched_distance(&real.eigenvalues, &complex.eigenvalues));
    let unpaired = real
        .eigenvalues
        .iter()
        .filter(|z| z.im != 0.0 && !real.eigenvalues.contains(&z.conj()))
        .count();
    println!("complex eigenvalues without an exact conjugate in the real run: {unpaired}");
}
