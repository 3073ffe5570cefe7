//! Aggressive early deflation on the trailing window of the active block.
//!
//! The trailing `k x k` block is itself Hermitian-plus-rank-one with the
//! sliced generators, so its Schur form is computed by the same structured
//! iteration. The rotations are also applied to the coupling column
//! `beta[s-1] e_1`, producing the spike `x`; trailing spike entries below
//! `eps * min(|beta[s-1]|, |T_ii|)` are dropped, which deflates the
//! corresponding eigenvalues, and the rest of the window is brought back to
//! Hessenberg form.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::colleague::Generators;
use crate::error::{Error, Result};
use crate::givens::{givens, Givens};
use crate::qrcore::{
    self, rotate_uv, DoubleShift, GenStore, Mode, RotationHook, RotationRecord, RunConfig, RunState,
    SingleShift, StabilityTracker, TraceEvent, EPS,
};
use crate::scalar::{norm2, Complex64, Scalar};

/// Applies window rotations to the spike vector.
struct SpikeHook<T> {
    start: usize,
    x: Vec<T>,
}

impl<T: Scalar> RotationHook<T> for SpikeHook<T> {
    #[inline(always)]
    fn rotated(&mut self, row: usize, g: &Givens<T>) {
        let k = row - self.start;
        let (a, b) = g.apply_left(self.x[k], self.x[k + 1]);
        self.x[k] = a;
        self.x[k + 1] = b;
    }
}

/// Copy of the rows an AED attempt may modify.
struct Checkpoint<T> {
    start: usize,
    d: Vec<T>,
    beta: Vec<T>,
    u: Vec<T>,
    v: Vec<T>,
}

impl<T: Scalar> Checkpoint<T> {
    fn save<S: GenStore<T>>(s: &S, start: usize, hi: usize) -> Self {
        Checkpoint {
            start,
            d: (start..=hi).map(|i| s.d(i)).collect(),
            beta: (start - 1..hi).map(|i| s.beta(i)).collect(),
            u: (start..=hi).map(|i| s.u(i)).collect(),
            v: (start..=hi).map(|i| s.v(i)).collect(),
        }
    }

    fn restore<S: GenStore<T>>(&self, s: &mut S) {
        for (k, i) in (self.start..self.start + self.d.len()).enumerate() {
            s.set_d(i, self.d[k]);
            s.set_u(i, self.u[k]);
            s.set_v(i, self.v[k]);
        }
        for (k, &b) in self.beta.iter().enumerate() {
            s.set_beta(self.start - 1 + k, b);
        }
    }
}

/// Result of computing the window Schur form.
struct Window<T> {
    start: usize,
    spike: Vec<T>,
    /// `|beta[start - 1]|` before the window solve.
    coupling: f64,
    eig: Vec<Complex64>,
    sweeps: usize,
}

fn window_schur<M: Mode, S: GenStore<M::T>>(
    s: &mut S,
    start: usize,
    hi: usize,
    tr: &mut StabilityTracker,
    exceptional_every: usize,
    seed: u64,
) -> Option<Window<M::T>> {
    let k = hi + 1 - start;
    let mut hook = SpikeHook {
        start,
        x: vec![M::T::zero(); k],
    };
    hook.x[0] = s.beta(start - 1);
    let coupling = hook.x[0].abs();
    let cfg = RunConfig {
        aed: None,
        schur: true,
        max_sweeps: 50 * k,
        exceptional_every,
        trace: false,
    };
    let mut st = RunState::new(seed);
    let mut eig = vec![Complex64::new(0.0, 0.0); k];
    qrcore::run::<M, S, _>(s, start, hi, &cfg, tr, &mut hook, &mut eig, &mut st).ok()?;
    Some(Window {
        start,
        spike: hook.x,
        coupling,
        eig,
        sweeps: st.sweeps,
    })
}

/// Number of spike entries that must be kept: the smallest `j` such that
/// every entry from `j` on passes the deflation test. Real 2x2 blocks of the
/// Schur form are kept or dropped together.
fn undeflated_count<T: Scalar, S: GenStore<T>>(s: &S, w: &Window<T>) -> usize {
    let coupling = w.coupling;
    let mut t = w.spike.len();
    while t > 0 {
        let row = w.start + t - 1;
        let block = if t >= 2 && !s.beta(row - 1).is_zero() { 2 } else { 1 };
        let mag = if block == 2 {
            let (a, b, c, e) = (s.d(row - 1), qrcore::superdiag(s, row - 1), s.beta(row - 1), s.d(row));
            (a * e - b * c).abs().sqrt()
        } else {
            s.d(row).abs()
        };
        // An exactly zero diagonal would forbid any deflation; fall back to
        // the coupling alone.
        let mag = if mag == 0.0 { coupling } else { mag };
        let threshold = coupling.min(mag) * EPS;
        if (t - block..t).all(|q| w.spike[q].abs() <= threshold) {
            t -= block;
        } else {
            break;
        }
    }
    t
}

/// Brings a window whose first column is a spike back to Hessenberg form.
///
/// `x[0]` sits at `(start, start - 1)` (already stored in `beta`), `x[q]` at
/// `(start + q, start - 1)`; rows `start ..= start + x.len() - 1` are upper
/// triangular apart from real 2x2 blocks. Spike entries are annihilated from
/// the bottom and each bulge is chased off the window before the next one.
/// Fill caused by 2x2 blocks is removed afterwards by plain Givens
/// elimination.
pub(crate) fn restore_core<T: Scalar, S: GenStore<T>>(
    s: &mut S,
    start: usize,
    x: &[T],
    tr: &mut StabilityTracker,
    mut log: Option<&mut Vec<RotationRecord<T>>>,
) {
    let j = x.len();
    if j < 2 {
        return;
    }
    let m = j + 1;
    let glob = |a: usize| start - 1 + a;
    let mut w = vec![T::zero(); m * m];
    for a in 0..m {
        w[a * m + a] = s.d(glob(a));
        if a + 1 < m {
            w[(a + 1) * m + a] = if a == 0 { x[0] } else { s.beta(glob(a)) };
        }
    }
    for (q, &xq) in x.iter().enumerate().skip(1) {
        w[(q + 1) * m] = xq;
    }
    for a in 0..m {
        for b in a + 1..m {
            let (ga, gb) = (glob(a), glob(b));
            w[a * m + b] = w[b * m + a].conj() - s.u(gb).conj() * s.v(ga) + s.u(ga) * s.v(gb).conj();
        }
    }
    let mut rot = |w: &mut [T], s: &mut S, p: usize, g: Givens<T>| {
        for c in 0..m {
            let (a, b) = g.apply_left(w[p * m + c], w[(p + 1) * m + c]);
            w[p * m + c] = a;
            w[(p + 1) * m + c] = b;
        }
        for r in 0..m {
            let (a, b) = g.apply_right(w[r * m + p], w[r * m + p + 1]);
            w[r * m + p] = a;
            w[r * m + p + 1] = b;
        }
        rotate_uv(s, glob(p), &g, tr);
        if let Some(log) = log.as_deref_mut() {
            log.push(RotationRecord { row: glob(p), g });
        }
    };
    for r in (2..=j).rev() {
        if w[r * m].is_zero() {
            continue;
        }
        let (g, _) = givens(w[(r - 1) * m], w[r * m]);
        rot(&mut w, s, r - 1, g);
        w[r * m] = T::zero();
        for q in r..j {
            let fill = w[(q + 1) * m + q - 1];
            if fill.is_zero() {
                continue;
            }
            let (g, _) = givens(w[q * m + q - 1], fill);
            rot(&mut w, s, q, g);
            w[(q + 1) * m + q - 1] = T::zero();
        }
    }
    // With 2x2 blocks on the diagonal the chase above leaves fill further
    // below the subdiagonal; clear it column by column. Nothing happens here
    // for a triangular window.
    for c in 0..m.saturating_sub(2) {
        for r in (c + 2..m).rev() {
            let fill = w[r * m + c];
            if fill.is_zero() {
                continue;
            }
            let (g, _) = givens(w[(r - 1) * m + c], fill);
            rot(&mut w, s, r - 1, g);
            w[r * m + c] = T::zero();
        }
    }
    for a in 0..m {
        if a >= 1 {
            s.set_d(glob(a), w[a * m + a]);
        }
        if a + 1 < m {
            s.set_beta(glob(a), w[(a + 1) * m + a]);
        }
    }
}

/// What an AED attempt achieved.
pub(crate) struct AedOutcome {
    pub deflated: usize,
    /// Undeflated window eigenvalues, nearest to the new corner first.
    pub shifts: Vec<Complex64>,
}

/// One AED attempt on the trailing `k` rows of `lo..=hi`. Returns `None` if
/// the window solve failed; the window is then restored from a checkpoint.
pub(crate) fn aed_step<M: Mode, S: GenStore<M::T>>(
    s: &mut S,
    lo: usize,
    hi: usize,
    k: usize,
    tr: &mut StabilityTracker,
    cfg: &RunConfig,
    st: &mut RunState,
) -> Option<AedOutcome> {
    let start = hi + 1 - k;
    debug_assert!(start > lo);
    let checkpoint = Checkpoint::save(s, start, hi);
    let seed = st.rng.random();
    st.aed_calls += 1;
    let Some(window) = window_schur::<M, S>(s, start, hi, tr, cfg.exceptional_every, seed) else {
        checkpoint.restore(s);
        return None;
    };
    st.aed_sweeps += window.sweeps;
    let t = undeflated_count(s, &window);
    let deflated = k - t;
    if t == 0 {
        s.set_beta(start - 1, M::T::zero());
    } else {
        s.set_beta(start - 1, window.spike[0]);
        restore_core(s, start, &window.spike[..t], tr, None);
    }
    st.aed_deflated += deflated;
    let mut shifts = window.eig[..t].to_vec();
    if t > 0 {
        let corner = s.d(start + t - 1).to_complex();
        shifts.sort_by(|a, b| (a - corner).norm().total_cmp(&(b - corner).norm()));
    }
    if cfg.trace {
        st.trace.push(TraceEvent::Aed {
            k,
            deflated,
            shifts_returned: shifts.len(),
            spike_norm: norm2(&window.spike),
        });
    }
    Some(AedOutcome { deflated, shifts })
}

// ---------------------------------------------------------------------------
// Public interface

/// Outcome of a stand-alone AED step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AedReport {
    pub k: usize,
    pub deflated: usize,
    pub shifts: Vec<Complex64>,
    pub window_sweeps: usize,
    pub spike_norm: f64,
    /// The window solve did not converge and the matrix was left unchanged.
    pub aborted: bool,
}

/// A trailing window in Schur form together with its spike, as produced by
/// [`aed_window`].
#[derive(Debug, Clone)]
pub struct AedWindow<T> {
    pub k: usize,
    /// First row of the window (0-based).
    pub start: usize,
    pub spike: Vec<T>,
    /// Diagonal of the Schur form; conjugate pairs for real 2x2 blocks.
    pub schur_diag: Vec<Complex64>,
}

fn check_window<T: Scalar>(g: &Generators<T>, k: usize) -> Result<(usize, usize)> {
    let (lo, hi) = g.active();
    if k == 0 || k > hi - lo {
        return Err(Error::InvalidArgument(format!(
            "AED window {k} must satisfy 1 <= k < active size {}",
            hi - lo + 1
        )));
    }
    if !g.bulge().is_empty() {
        return Err(Error::InvalidArgument("a bulge is being chased".into()));
    }
    Ok((lo, hi))
}

fn window_public<M: Mode>(
    g: &mut Generators<M::T>,
    k: usize,
    tr: &mut StabilityTracker,
) -> Result<AedWindow<M::T>> {
    let (_, hi) = check_window(g, k)?;
    let start = hi + 1 - k;
    let w = window_schur::<M, _>(g, start, hi, tr, 15, 0).ok_or_else(|| {
        Error::InvalidArgument("window Schur form did not converge".into())
    })?;
    g.beta[start - 1] = w.spike[0];
    for (q, &x) in w.spike.iter().enumerate().skip(1) {
        g.set_bulge_entry(start + q, start - 1, x)?;
    }
    Ok(AedWindow {
        k,
        start,
        spike: w.spike,
        schur_diag: w.eig,
    })
}

/// Reduces the trailing `k x k` block of the active window to Schur form and
/// stores the spike in `g` (its head in `beta`, the rest as off-Hessenberg
/// entries), so `g.densify()` shows the transformed matrix.
pub fn aed_window(
    g: &mut Generators<Complex64>,
    k: usize,
    tr: &mut StabilityTracker,
) -> Result<AedWindow<Complex64>> {
    window_public::<SingleShift>(g, k, tr)
}

/// Real-arithmetic variant of [`aed_window`]; the Schur form is
/// quasi-triangular.
pub fn aed_window_real(
    g: &mut Generators<f64>,
    k: usize,
    tr: &mut StabilityTracker,
) -> Result<AedWindow<f64>> {
    window_public::<DoubleShift>(g, k, tr)
}

/// Annihilates the spike stored in column `start - 1` of `g` (see
/// [`aed_window`]) and returns the rotations used.
pub fn restore_hessenberg<T: Scalar>(
    g: &mut Generators<T>,
    start: usize,
    tr: &mut StabilityTracker,
) -> Result<Vec<RotationRecord<T>>> {
    if start == 0 || start >= g.dim() {
        return Err(Error::IndexOutOfRange {
            i: start,
            j: start,
            n: g.dim(),
        });
    }
    let mut end = start;
    let mut x = vec![g.beta[start - 1]];
    for b in g.bulge() {
        if b.col != start - 1 {
            return Err(Error::InvalidArgument(format!(
                "off-Hessenberg entry ({}, {}) is not part of the spike",
                b.row, b.col
            )));
        }
        end = end.max(b.row);
    }
    for row in start + 1..=end {
        x.push(g.bulge_at(row, start - 1));
    }
    g.bulge.clear();
    let mut log = Vec::new();
    restore_core(g, start, &x, tr, Some(&mut log));
    Ok(log)
}

fn step_public<M: Mode>(g: &mut Generators<M::T>, k: usize) -> Result<AedReport> {
    let (lo, hi) = check_window(g, k)?;
    let mut tr = StabilityTracker::new(g, M::J);
    let cfg = RunConfig {
        aed: None,
        schur: false,
        max_sweeps: 0,
        exceptional_every: 15,
        trace: true,
    };
    let mut st = RunState::new(0);
    match aed_step::<M, _>(g, lo, hi, k, &mut tr, &cfg, &mut st) {
        Some(out) => {
            let spike_norm = match st.trace.last() {
                Some(TraceEvent::Aed { spike_norm, .. }) => *spike_norm,
                _ => 0.0,
            };
            Ok(AedReport {
                k,
                deflated: out.deflated,
                shifts: out.shifts,
                window_sweeps: st.aed_sweeps,
                spike_norm,
                aborted: false,
            })
        }
        None => Ok(AedReport {
            k,
            deflated: 0,
            shifts: Vec::new(),
            window_sweeps: 0,
            spike_norm: g.beta[hi - k].abs(),
            aborted: true,
        }),
    }
}

/// One AED step on the trailing `k` rows of the active window (complex
/// single-shift arithmetic). Deflated eigenvalues end up isolated at the
/// bottom with zero subdiagonal coupling.
pub fn aed_step_complex(g: &mut Generators<Complex64>, k: usize) -> Result<AedReport> {
    step_public::<SingleShift>(g, k)
}

/// Real-arithmetic variant of [`aed_step_complex`].
pub fn aed_step_real(g: &mut Generators<f64>, k: usize) -> Result<AedReport> {
    step_public::<DoubleShift>(g, k)
}
