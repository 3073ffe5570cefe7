//! Several bulges chased at once, each by its own thread.
//!
//! Bulges start one after another at the top of the active window and trail
//! each other by a fixed number of rows, so no two threads ever touch the
//! same generator entries. With instrumentation on, every chasing step
//! records the index ranges it read and wrote.

use std::time::Instant;

use chebqr::bench::random_monic;
use chebqr::colleague::{build_colleague, DEFAULT_MONIC_TOL};
use chebqr::oracle::matched_distance;
use chebqr::parchase::{gap, parallel_eigenvalues, parallel_eigenvalues_logged, ParallelOptions};
use chebqr::qrcore::SolveOptions;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = random_monic(600, &mut rng).to_complex();
    let g = build_colleague(&p, DEFAULT_MONIC_TOL).unwrap();
    let opts = SolveOptions::default();

    let t = Instant::now();
    let seq = parallel_eigenvalues(&mut g.clone(), 1, &opts).unwrap();
    let t1 = t.elapsed();
    let t = Instant::now();
    let (par, log) = parallel_eigenvalues_logged(
        &mut g.clone(),
        &ParallelOptions { workers: 4, instrument: true },
        &opts,
    )
    .unwrap();
    let t4 = t.elapsed();

    println!("sequential {t1:.2?}, 4 workers {t4:.2?}");
    println!("eigenvalue distance: {:.2e}", matched_distance(&seq.eigenvalues, &par.eigenvalues));
    println!(
        "{} flushes, {} tickets, {} chasing steps",
        log.flushes.len(),
        log.tickets.len(),
        log.steps.len()
    );
    let busiest = log.flushes.iter().max_by_key(|f| f.tickets).unwrap();
    println!("largest flush: {} bulges on {} workers", busiest.tickets, busiest.workers);
    println!(
        "minimum spacing {} rows: {} violations, {} conflicting step pairs",
        gap(1),
        log.gap_violations(1).len(),
        log.conflicts().len()
    );
}
