//! Pipelined multi-bulge driver.
//!
//! Each flush takes a pool of shifts from an AED window at the bottom of the
//! active block and injects one bulge per shift at its head. Bulges are chased
//! by a pool of scoped threads over one shared set of generators. Ticket `t`
//! may take a step only while its predecessor `t - 1` stays at least [`gap`]
//! columns further down, so no two concurrent steps touch the same row. All
//! deflation work happens between flushes.

use std::cell::Cell;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::aed;
use crate::colleague::Generators;
use crate::error::{Error, Result};
use crate::qrcore::{
    self, chase, start_sweep, Bulge, DoubleShift, GenStore, Mode, NoHook, RootReport, RunConfig,
    RunState, SingleShift, SolveOptions, StabilityTracker, Stuck, SweepPlan,
};
use crate::scalar::{Complex64, Scalar};

const PENDING: usize = 0;
const RETIRED: usize = usize::MAX;

/// Minimum distance in columns between the anchors of consecutive bulges:
/// 6 for single-shift steps (window parameter 1), 8 for double-shift steps.
pub const fn gap(window_j: usize) -> usize {
    if window_j >= 2 {
        8
    } else {
        6
    }
}

/// Concurrency level for an active block of `size` rows: `workers`, halved
/// until the block holds at least 64 rows per worker.
pub fn effective_workers(workers: usize, size: usize) -> usize {
    let mut w = workers.max(1);
    while w > 1 && size < 64 * w {
        w /= 2;
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TicketState {
    Pending,
    Chasing,
    Retired,
}

/// Snapshot of one bulge in the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BulgeTicket {
    pub id: usize,
    pub shift: SweepPlan,
    /// Column of the bulge anchor; `None` before the first step.
    pub position: Option<usize>,
    pub state: TicketState,
}

/// Rows touched by one chasing step and when it ran, on a global step clock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Index of the flush the step belongs to.
    pub flush: usize,
    pub ticket: usize,
    /// Anchor column before the step, `lo - 1` for the first one.
    pub from: isize,
    pub reads: (usize, usize),
    pub writes: (usize, usize),
    /// Predecessor anchor seen when the step was allowed (`None` if retired
    /// or if this is the first ticket).
    pub predecessor: Option<usize>,
    pub begin: u64,
    pub end: u64,
}

impl StepRecord {
    /// Whether the two steps may have run at the same time.
    pub fn overlaps_in_time(&self, other: &StepRecord) -> bool {
        self.flush == other.flush && self.begin < other.end && other.begin < self.end
    }

    /// Whether one step wrote a row the other read or wrote.
    pub fn conflicts_with(&self, other: &StepRecord) -> bool {
        let meet = |a: (usize, usize), b: (usize, usize)| a.0 <= b.1 && b.0 <= a.1;
        meet(self.writes, other.reads)
            || meet(self.writes, other.writes)
            || meet(other.writes, self.reads)
    }
}

/// Per-flush diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlushRecord {
    pub tickets: usize,
    pub workers: usize,
    /// Active block, 1-based and inclusive.
    pub active: (usize, usize),
    /// Deflations recorded so far.
    pub deflations: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PipelineLog {
    pub flushes: Vec<FlushRecord>,
    /// Every chasing step; only filled when instrumentation is on.
    pub steps: Vec<StepRecord>,
    /// Final state of every ticket; only filled when instrumentation is on.
    pub tickets: Vec<BulgeTicket>,
}

impl PipelineLog {
    /// Steps that violated the ordering protocol.
    pub fn gap_violations(&self, window_j: usize) -> Vec<StepRecord> {
        let g = gap(window_j) as isize;
        self.steps
            .iter()
            .filter(|s| matches!(s.predecessor, Some(p) if (p as isize) < s.from + g))
            .copied()
            .collect()
    }

    /// Pairs of steps that overlapped in time and touched a common row.
    pub fn conflicts(&self) -> Vec<(StepRecord, StepRecord)> {
        let mut by_start = self.steps.clone();
        by_start.sort_by_key(|s| s.begin);
        let mut out = Vec::new();
        for (i, a) in by_start.iter().enumerate() {
            for b in by_start[i + 1..].iter().take_while(|b| b.begin < a.end) {
                if a.ticket != b.ticket && a.overlaps_in_time(b) && a.conflicts_with(b) {
                    out.push((*a, *b));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelOptions {
    pub workers: usize,
    /// Record per-step footprints and ticket snapshots.
    pub instrument: bool,
}

impl ParallelOptions {
    pub fn new(workers: usize) -> Self {
        ParallelOptions {
            workers,
            instrument: false,
        }
    }
}

// ---------------------------------------------------------------------------
// Shared storage

/// Raw view of the generator arrays handed to every worker of a flush.
#[derive(Clone, Copy)]
struct SharedView<T> {
    d: *mut T,
    beta: *mut T,
    u: *mut T,
    v: *mut T,
    n: usize,
}

// SAFETY: workers only touch rows their ticket owns under the ordering
// protocol; positions are published with release stores and read with
// acquire loads, so every row access is ordered after the previous owner's.
unsafe impl<T: Send> Send for SharedView<T> {}
unsafe impl<T: Send> Sync for SharedView<T> {}

impl<T: Scalar> SharedView<T> {
    fn new(g: &mut Generators<T>) -> Self {
        SharedView {
            d: g.d.as_mut_ptr(),
            beta: g.beta.as_mut_ptr(),
            u: g.u.as_mut_ptr(),
            v: g.v.as_mut_ptr(),
            n: g.d.len(),
        }
    }
}

impl<T: Scalar> GenStore<T> for SharedView<T> {
    #[inline(always)]
    fn d(&self, i: usize) -> T {
        debug_assert!(i < self.n);
        unsafe { self.d.add(i).read() }
    }
    #[inline(always)]
    fn beta(&self, i: usize) -> T {
        debug_assert!(i + 1 < self.n);
        unsafe { self.beta.add(i).read() }
    }
    #[inline(always)]
    fn u(&self, i: usize) -> T {
        debug_assert!(i < self.n);
        unsafe { self.u.add(i).read() }
    }
    #[inline(always)]
    fn v(&self, i: usize) -> T {
        debug_assert!(i < self.n);
        unsafe { self.v.add(i).read() }
    }
    #[inline(always)]
    fn set_d(&mut self, i: usize, x: T) {
        debug_assert!(i < self.n);
        unsafe { self.d.add(i).write(x) }
    }
    #[inline(always)]
    fn set_beta(&mut self, i: usize, x: T) {
        debug_assert!(i + 1 < self.n);
        unsafe { self.beta.add(i).write(x) }
    }
    #[inline(always)]
    fn set_u(&mut self, i: usize, x: T) {
        debug_assert!(i < self.n);
        unsafe { self.u.add(i).write(x) }
    }
    #[inline(always)]
    fn set_v(&mut self, i: usize, x: T) {
        debug_assert!(i < self.n);
        unsafe { self.v.add(i).write(x) }
    }
}

/// Wrapper recording the smallest and largest row read and written.
struct Recording<S> {
    inner: S,
    reads: Cell<(usize, usize)>,
    writes: (usize, usize),
}

impl<S> Recording<S> {
    fn new(inner: S) -> Self {
        Recording {
            inner,
            reads: Cell::new((usize::MAX, 0)),
            writes: (usize::MAX, 0),
        }
    }

    fn reset(&mut self) -> ((usize, usize), (usize, usize)) {
        let out = (self.reads.get(), self.writes);
        self.reads.set((usize::MAX, 0));
        self.writes = (usize::MAX, 0);
        out
    }

    #[inline(always)]
    fn read(&self, i: usize) {
        let (a, b) = self.reads.get();
        self.reads.set((a.min(i), b.max(i)));
    }

    #[inline(always)]
    fn write(&mut self, i: usize) {
        self.writes = (self.writes.0.min(i), self.writes.1.max(i));
    }
}

impl<T: Scalar, S: GenStore<T>> GenStore<T> for Recording<S> {
    fn d(&self, i: usize) -> T {
        self.read(i);
        self.inner.d(i)
    }
    fn beta(&self, i: usize) -> T {
        self.read(i);
        self.inner.beta(i)
    }
    fn u(&self, i: usize) -> T {
        self.read(i);
        self.inner.u(i)
    }
    fn v(&self, i: usize) -> T {
        self.read(i);
        self.inner.v(i)
    }
    fn set_d(&mut self, i: usize, x: T) {
        self.write(i);
        self.inner.set_d(i, x)
    }
    fn set_beta(&mut self, i: usize, x: T) {
        self.write(i);
        self.inner.set_beta(i, x)
    }
    fn set_u(&mut self, i: usize, x: T) {
        self.write(i);
        self.inner.set_u(i, x)
    }
    fn set_v(&mut self, i: usize, x: T) {
        self.write(i);
        self.inner.set_v(i, x)
    }
}

// ---------------------------------------------------------------------------
// One flush

struct Pipeline<'a> {
    lo: usize,
    hi: usize,
    gap: usize,
    /// Anchor column plus two; `PENDING` before the first step.
    positions: &'a [AtomicUsize],
    clock: &'a AtomicU64,
    index: usize,
}

impl Pipeline<'_> {
    /// Blocks until ticket `t` may step from encoded position `at`; returns
    /// the predecessor position that allowed it.
    fn wait(&self, t: usize, at: usize) -> usize {
        if t == 0 {
            return RETIRED;
        }
        let mut spins = 0u32;
        loop {
            let p = self.positions[t - 1].load(Ordering::Acquire);
            if p == RETIRED || (p != PENDING && p >= at + self.gap) {
                return p;
            }
            spins += 1;
            if spins < 64 {
                std::hint::spin_loop();
            } else {
                std::thread::yield_now();
            }
        }
    }

    /// Chases ticket `t` from the head of the window to the bottom.
    fn chase_ticket<T: Scalar, S: GenStore<T>>(
        &self,
        t: usize,
        s: &mut S,
        plan: &SweepPlan,
        tr: &mut StabilityTracker,
    ) {
        let mut at = self.lo + 1;
        let mut bulge: Option<Bulge<T>> = None;
        loop {
            let allowed = self.wait(t, at);
            loop {
                bulge = if at == self.lo + 1 {
                    start_sweep(s, self.lo, self.hi, plan, tr, &mut NoHook)
                } else {
                    chase(s, self.hi, bulge.expect("live bulge"), tr, &mut NoHook)
                };
                if bulge.is_none() {
                    self.positions[t].store(RETIRED, Ordering::Release);
                    tr.count_sweep();
                    return;
                }
                at += 1;
                self.positions[t].store(at, Ordering::Release);
                if allowed != RETIRED && allowed < at + self.gap {
                    break;
                }
            }
        }
    }

    /// As [`Pipeline::chase_ticket`], one step at a time with footprints.
    fn chase_ticket_recorded<T: Scalar, S: GenStore<T>>(
        &self,
        t: usize,
        s: S,
        plan: &SweepPlan,
        tr: &mut StabilityTracker,
        steps: &mut Vec<StepRecord>,
    ) {
        let mut s = Recording::new(s);
        let mut at = self.lo + 1;
        let mut bulge: Option<Bulge<T>> = None;
        loop {
            let allowed = self.wait(t, at);
            let begin = self.clock.fetch_add(1, Ordering::SeqCst);
            bulge = if at == self.lo + 1 {
                start_sweep(&mut s, self.lo, self.hi, plan, tr, &mut NoHook)
            } else {
                chase(&mut s, self.hi, bulge.expect("live bulge"), tr, &mut NoHook)
            };
            let end = self.clock.fetch_add(1, Ordering::SeqCst);
            let (reads, writes) = s.reset();
            steps.push(StepRecord {
                flush: self.index,
                ticket: t,
                from: at as isize - 2,
                reads,
                writes,
                predecessor: (allowed != RETIRED).then(|| allowed - 2),
                begin,
                end,
            });
            if bulge.is_none() {
                self.positions[t].store(RETIRED, Ordering::Release);
                tr.count_sweep();
                return;
            }
            at += 1;
            self.positions[t].store(at, Ordering::Release);
        }
    }
}

struct FlushOutcome {
    trackers: Vec<StabilityTracker>,
    steps: Vec<StepRecord>,
}

/// Chases one bulge per plan through `lo..=hi` with `workers` threads.
#[allow(clippy::too_many_arguments)]
fn flush<T: Scalar>(
    g: &mut Generators<T>,
    lo: usize,
    hi: usize,
    plans: &[SweepPlan],
    workers: usize,
    tr: &StabilityTracker,
    instrument: bool,
    clock: &AtomicU64,
    index: usize,
) -> FlushOutcome {
    let positions: Vec<AtomicUsize> = plans.iter().map(|_| AtomicUsize::new(PENDING)).collect();
    let pipe = Pipeline {
        lo,
        hi,
        gap: gap(tr.window_j()),
        positions: &positions,
        clock,
        index,
    };
    let view = SharedView::new(g);
    let threads = workers.min(plans.len()).max(1);
    let results: Vec<(Vec<StabilityTracker>, Vec<StepRecord>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                let pipe = &pipe;
                let base = tr.fork();
                scope.spawn(move || {
                    let mut trackers = Vec::new();
                    let mut steps = Vec::new();
                    for t in (w..plans.len()).step_by(threads) {
                        let mut local = base.fork();
                        if instrument {
                            pipe.chase_ticket_recorded(t, view, &plans[t], &mut local, &mut steps);
                        } else {
                            let mut s = view;
                            pipe.chase_ticket(t, &mut s, &plans[t], &mut local);
                        }
                        trackers.push(local);
                    }
                    (trackers, steps)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("chasing worker panicked"))
            .collect()
    });
    let mut out = FlushOutcome {
        trackers: Vec::new(),
        steps: Vec::new(),
    };
    for (trackers, steps) in results {
        out.trackers.extend(trackers);
        out.steps.extend(steps);
    }
    out
}

// ---------------------------------------------------------------------------
// Driver

fn drive<M: Mode>(
    g: &mut Generators<M::T>,
    popts: &ParallelOptions,
    opts: &SolveOptions,
) -> Result<(RootReport, PipelineLog)> {
    if popts.workers == 0 {
        return Err(Error::InvalidArgument("workers must be at least 1".into()));
    }
    if popts.workers == 1 {
        return Ok((qrcore::solve::<M>(g, opts)?, PipelineLog::default()));
    }
    qrcore::validate(g)?;
    let n = g.dim();
    let mut tr = StabilityTracker::new(g, M::J);
    let cfg = RunConfig {
        aed: opts.aed.enabled.then_some(opts.aed),
        schur: false,
        max_sweeps: opts.max_sweeps_factor.saturating_mul(n).max(1),
        exceptional_every: opts.exceptional_every,
        trace: opts.trace,
    };
    let mut st = RunState::new(opts.seed);
    let mut eig = vec![Complex64::new(0.0, 0.0); n];
    let mut log = PipelineLog::default();
    let clock = AtomicU64::new(0);
    g.bulge.clear();
    let (lo0, hi0) = g.active();
    let mut hi = hi0 as isize;
    let mut stagnant = 0usize;
    let mut outcome = Ok(());
    while hi >= lo0 as isize {
        let h = hi as usize;
        let mut lo = h;
        while lo > lo0 {
            if qrcore::negligible(g, lo - 1, qrcore::EPS) {
                g.beta[lo - 1] = M::T::zero();
                break;
            }
            lo -= 1;
        }
        let size = h - lo + 1;
        let w = effective_workers(popts.workers, size);
        if w < 2 {
            let r = qrcore::run::<M, _, _>(g, lo, h, &cfg, &mut tr, &mut NoHook, &mut eig[lo..=h], &mut st);
            if let Err(stuck) = r {
                outcome = Err(stuck);
                break;
            }
            hi = lo as isize - 1;
            continue;
        }
        if st.sweeps >= cfg.max_sweeps {
            outcome = Err(Stuck { lo, hi: h });
            break;
        }
        let mut plans = Vec::new();
        if let Some(aed_opts) = cfg.aed {
            let k = aed_opts.window.unwrap_or(9 * w).min(size / 3);
            if k >= 2 {
                if let Some(out) = aed::aed_step::<M, _>(g, lo, h, k, &mut tr, &cfg, &mut st) {
                    if out.deflated > 0 {
                        stagnant = 0;
                        continue;
                    }
                    let take = (6 * w).min(out.shifts.len());
                    plans = M::plans(&out.shifts[..take]);
                }
            }
        }
        stagnant += 1;
        if cfg.exceptional_every > 0 && stagnant.is_multiple_of(cfg.exceptional_every) {
            plans = vec![M::exceptional(&*g, lo, h, &mut st.rng)];
        } else if plans.is_empty() {
            plans = vec![M::regular(&*g, h)];
        }
        let fl = flush(g, lo, h, &plans, w, &tr, popts.instrument, &clock, log.flushes.len());
        for t in &fl.trackers {
            tr.merge(t);
        }
        st.sweeps += plans.len();
        if popts.instrument {
            log.steps.extend(fl.steps);
            let first = log.tickets.len();
            log.tickets.extend(plans.iter().enumerate().map(|(i, &shift)| BulgeTicket {
                id: first + i,
                shift,
                position: None,
                state: TicketState::Retired,
            }));
        }
        log.flushes.push(FlushRecord {
            tickets: plans.len(),
            workers: w,
            active: (lo + 1, h + 1),
            deflations: st.deflations.len(),
        });
    }
    let report = qrcore::finish(outcome, eig, tr, st, M::J)?;
    Ok((report, log))
}

/// Eigenvalues of a complex generator matrix with `workers` concurrent
/// single-shift bulges. `workers = 1` is the sequential driver.
pub fn parallel_eigenvalues(
    g: &mut Generators<Complex64>,
    workers: usize,
    opts: &SolveOptions,
) -> Result<RootReport> {
    drive::<SingleShift>(g, &ParallelOptions::new(workers), opts).map(|(r, _)| r)
}

/// Real double-shift counterpart of [`parallel_eigenvalues`].
pub fn parallel_eigenvalues_real(
    g: &mut Generators<f64>,
    workers: usize,
    opts: &SolveOptions,
) -> Result<RootReport> {
    drive::<DoubleShift>(g, &ParallelOptions::new(workers), opts).map(|(r, _)| r)
}

/// [`parallel_eigenvalues`] with the pipeline log.
pub fn parallel_eigenvalues_logged(
    g: &mut Generators<Complex64>,
    popts: &ParallelOptions,
    opts: &SolveOptions,
) -> Result<(RootReport, PipelineLog)> {
    drive::<SingleShift>(g, popts, opts)
}

/// [`parallel_eigenvalues_real`] with the pipeline log.
pub fn parallel_eigenvalues_real_logged(
    g: &mut Generators<f64>,
    popts: &ParallelOptions,
    opts: &SolveOptions,
) -> Result<(RootReport, PipelineLog)> {
    drive::<DoubleShift>(g, popts, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebtech::ChebSeries;
    use crate::colleague::{build_colleague, DEFAULT_MONIC_TOL};
    use crate::oracle::matched_distance;
    use crate::qrcore::{eigenvalues, eigenvalues_real};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_real(n: usize, seed: u64) -> Generators<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c: Vec<f64> = (0..=n).map(|_| rng.random_range(-1.0..1.0)).collect();
        c[n] = 1.0;
        build_colleague(&ChebSeries::new(c), DEFAULT_MONIC_TOL).unwrap()
    }

    fn scale<T: Scalar>(g: &Generators<T>) -> f64 {
        let sq = |xs: &[T]| xs.iter().map(|x| x.abs2()).sum::<f64>();
        (sq(g.d()) + 2.0 * sq(g.beta())).sqrt() + g.u_norm() * g.v_norm()
    }

    #[test]
    fn concurrency_is_halved_on_small_blocks() {
        assert_eq!(effective_workers(4, 1000), 4);
        assert_eq!(effective_workers(4, 255), 2);
        assert_eq!(effective_workers(4, 127), 1);
        assert_eq!(effective_workers(8, 300), 4);
        assert_eq!(effective_workers(1, 10_000), 1);
        assert_eq!(effective_workers(0, 10), 1);
    }

    #[test]
    fn one_worker_is_the_sequential_driver() {
        let g = random_real(150, 1);
        let opts = SolveOptions::default();
        let seq = eigenvalues(&mut g.to_complex(), &opts).unwrap();
        let par = parallel_eigenvalues(&mut g.to_complex(), 1, &opts).unwrap();
        assert_eq!(seq.eigenvalues, par.eigenvalues);
        assert_eq!(seq.iterations, par.iterations);
        assert_eq!(seq.gamma_hat.to_bits(), par.gamma_hat.to_bits());
        let seq = eigenvalues_real(&mut g.clone(), &opts).unwrap();
        let par = parallel_eigenvalues_real(&mut g.clone(), 1, &opts).unwrap();
        assert_eq!(seq.eigenvalues, par.eigenvalues);
    }

    #[test]
    fn zero_workers_is_rejected() {
        let mut g = random_real(10, 2).to_complex();
        assert!(matches!(
            parallel_eigenvalues(&mut g, 0, &SolveOptions::default()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn several_workers_find_the_same_spectrum() {
        let g = random_real(600, 3);
        let opts = SolveOptions::default();
        let tol = 1e-9 * scale(&g);
        let seq = eigenvalues(&mut g.to_complex(), &opts).unwrap();
        let (par, log) =
            parallel_eigenvalues_logged(&mut g.to_complex(), &ParallelOptions::new(4), &opts).unwrap();
        assert!(log.flushes.iter().any(|f| f.tickets > 1 && f.workers == 4));
        assert!(matched_distance(&seq.eigenvalues, &par.eigenvalues) <= tol);
        assert!(par.gamma_hat.is_finite() && par.gamma_hat > 0.0);
        let seq = eigenvalues_real(&mut g.clone(), &opts).unwrap();
        let par = parallel_eigenvalues_real(&mut g.clone(), 3, &opts).unwrap();
        assert!(matched_distance(&seq.eigenvalues, &par.eigenvalues) <= tol);
    }

    #[test]
    fn instrumented_steps_respect_the_gap_and_never_collide() {
        let g = random_real(400, 4);
        let popts = ParallelOptions {
            workers: 4,
            instrument: true,
        };
        let opts = SolveOptions::default();
        let (_, log) = parallel_eigenvalues_logged(&mut g.to_complex(), &popts, &opts).unwrap();
        assert!(!log.steps.is_empty());
        assert!(log.gap_violations(1).is_empty());
        let c = log.conflicts();
        assert!(c.is_empty(), "{} conflicts, first {:?}", c.len(), c.first());
        assert!(log.tickets.iter().all(|t| t.state == TicketState::Retired));
        // Every step stays within the footprint the gap was derived from.
        for s in &log.steps {
            let from = s.from.max(0) as usize;
            assert!(s.writes.0 + 1 >= from.max(1) && s.writes.1 <= from + 3);
            assert!(s.reads.0 + 2 >= from && s.reads.1 <= from + 5);
        }
        let (_, log) = parallel_eigenvalues_real_logged(&mut g.clone(), &popts, &opts).unwrap();
        assert!(log.gap_violations(2).is_empty());
        assert!(log.conflicts().is_empty());
        for s in &log.steps {
            let from = s.from.max(0) as usize;
            assert!(s.writes.1 <= from + 4 && s.reads.1 <= from + 7);
            assert!(s.reads.0 + 3 >= from);
        }
    }
}
