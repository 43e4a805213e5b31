//! Ghost instrumentation for the powers-of-two machine.
//!
//! The single ghost is `snapGlob`, a copy of the tape taken at every
//! division-cycle boundary (leaving q0, and every time the rewind hands
//! control back to q1). The invariant catalog relates zero counts on the
//! snapshot with zero counts on the live tape; a leading blank counts as a
//! zero, it is just another spelling of one.
//!
//! `m2_check_invariants` is the direct, per-configuration reference
//! evaluation of the catalog. [`M2RunChecker`] evaluates the same clauses
//! through exact running counters so that exhaustive runs up to 2^16 stay
//! fast, and it audits itself against the reference checker on a deterministic
//! schedule (every configuration at small sizes, periodically plus at every
//! snapshot and halt at large ones). An audit mismatch is reported as a
//! distinct `harness-audit` clause: it would mean the harness itself broke,
//! not the machine.

use crate::ghost::{variant_decreases, Component, VariantTuple, Violation};
use crate::machines::{M2State, M2Tape};
use crate::oracles::is_power_of_2;
use crate::tm::{Configuration, StateId};

/// Counts as a zero: the zero symbol, or the blank standing in for the
/// crossed-out-but-still-counted first zero.
fn is_zero_like(s: M2Tape) -> bool {
    matches!(s, M2Tape::B | M2Tape::Z)
}

/// Number of zero-like symbols among the first `i` tape squares.
pub fn num_z_tape(tape: &[M2Tape], i: usize) -> usize {
    assert!(i <= tape.len(), "prefix {i} out of range");
    tape[..i].iter().filter(|&&s| is_zero_like(s)).count()
}

/// Number of zero-like symbols among the first `i` snapshot squares.
pub fn num_z_snap(snap: &[M2Tape], i: usize) -> usize {
    assert!(i <= snap.len(), "prefix {i} out of range");
    snap[..i].iter().filter(|&&s| is_zero_like(s)).count()
}

/// The snapshot ghost. Absent until the first division cycle starts; every
/// invariant that mentions it is guarded on presence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct M2Ghost {
    snap: Option<SnapData>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct SnapData {
    symbols: Vec<M2Tape>,
    /// z_prefix[i] = num_z_snap(symbols, i); kept so the per-step checks and
    /// the termination measure cost O(1).
    z_prefix: Vec<usize>,
}

impl M2Ghost {
    pub fn snapshot(&self) -> Option<&[M2Tape]> {
        self.snap.as_ref().map(|s| s.symbols.as_slice())
    }

    /// O(1) zero count over the first `i` snapshot squares.
    pub fn snap_zeroes(&self, i: usize) -> Option<usize> {
        self.snap.as_ref().and_then(|s| s.z_prefix.get(i).copied())
    }

    fn take_snapshot(&mut self, tape: &[M2Tape]) {
        let mut z_prefix = Vec::with_capacity(tape.len() + 1);
        let mut z = 0;
        z_prefix.push(0);
        for &s in tape {
            z += is_zero_like(s) as usize;
            z_prefix.push(z);
        }
        self.snap = Some(SnapData {
            symbols: tape.to_vec(),
            z_prefix,
        });
    }
}

/// Applies the snapshot annotations for one (pre-state, read symbol) event,
/// given the tape *after* the step's write. Returns whether a snapshot was
/// taken.
pub fn m2_ghost_update(
    state: M2State,
    read: M2Tape,
    g: &mut M2Ghost,
    post_write_tape: &[M2Tape],
) -> bool {
    match (state, read) {
        (M2State::Q0, M2Tape::Z) | (M2State::Q4, M2Tape::B) => {
            g.take_snapshot(post_write_tape);
            true
        }
        _ => false,
    }
}

/// The four-component termination measure: leaving q0, zeroes on the current
/// snapshot, scan-versus-rewind phase, and head progress within the phase.
pub fn m2_variant(
    c: &Configuration<M2State, M2Tape>,
    g: &M2Ghost,
    input_len: usize,
) -> VariantTuple {
    use M2State::*;
    let q = c.state;
    let leaving_q0 = Component::Applicable(if q == Q0 { 1 } else { 0 });
    let snap_zeroes = if q != Q0 {
        match g.snap_zeroes(input_len) {
            Some(z) => Component::Applicable(z as i64),
            // Reachable only in q_rej on the empty input, where the
            // comparison is already decided at the first component.
            None => Component::NotApplicable,
        }
    } else {
        Component::NotApplicable
    };
    let phase = match q {
        Q1 | Q2 | Q3 => Component::Applicable(1),
        Q4 | QAcc | QRej => Component::Applicable(0),
        Q0 => Component::NotApplicable,
    };
    let head = match q {
        Q1 | Q2 | Q3 => Component::Applicable(c.tape.len() as i64 - c.head as i64),
        Q4 => Component::Applicable(c.head as i64),
        _ => Component::NotApplicable,
    };
    VariantTuple(vec![leaving_q0, snap_zeroes, phase, head])
}

fn violation(
    c: &Configuration<M2State, M2Tape>,
    clause: &str,
    expected: impl Into<String>,
    actual: impl Into<String>,
) -> Violation {
    Violation::new(c.steps, c.state.name(), clause, expected, actual)
}

/// Direct evaluation of the full invariant catalog at one configuration:
/// the global tape-shape invariants, the per-state head ranges I0.*, the
/// snapshot agreement invariants I1–I3, the division-counting invariants
/// I4–I7 and I10.*, the power-of-two invariant I8, and I9 at the start.
pub fn m2_check_invariants(
    c: &Configuration<M2State, M2Tape>,
    g: &M2Ghost,
    input_len: usize,
) -> Vec<Violation> {
    use M2State::*;
    let mut out = Vec::new();
    let n = input_len;
    let len = c.tape.len();
    let p = c.head;
    let q = c.state;

    // Globals.
    if p > len {
        out.push(violation(c, "I0: 0 <= p <= t.Length", format!("p <= {len}"), format!("p = {p}")));
    }
    let expected_t0 = if n == 0 || q != Q0 { M2Tape::B } else { M2Tape::Z };
    if c.tape.first() != Some(&expected_t0) {
        out.push(violation(
            c,
            "global: t[0] == (a.Length == 0 || q != q0 ? B : Z)",
            format!("{expected_t0:?}"),
            format!("{:?}", c.tape.first()),
        ));
    }
    if n >= 1 && !c.tape[1..n.min(len)].iter().all(|&t| matches!(t, M2Tape::Z | M2Tape::X)) {
        out.push(violation(
            c,
            "global: t[i] in {Z, X} for 1 <= i < a.Length",
            "zeroes and crosses only".to_string(),
            "a blank inside the input region".to_string(),
        ));
    }
    if c.tape.get(n) != Some(&M2Tape::B) {
        out.push(violation(c, "global: t[a.Length] == B", "blank".to_string(), format!("{:?}", c.tape.get(n))));
    }

    // Snapshot presence: required everywhere past q0 except q_rej on the
    // empty input, which is reached without ever taking one.
    let snap_required = match q {
        Q0 => false,
        QRej => n != 0,
        _ => true,
    };
    let snap = g.snapshot();
    if snap_required && snap.is_none() {
        out.push(violation(c, "snapshot present", "snapGlob assigned".to_string(), "absent".to_string()));
    }
    let snap_z = |i: usize| g.snap_zeroes(i);
    let tape_z = |i: usize| (i <= len).then(|| num_z_tape(&c.tape, i));

    // I3 where required, so later clauses may index the snapshot safely.
    let i3 = |out: &mut Vec<Violation>| {
        if let Some(snap) = snap {
            if snap.len() != len {
                out.push(violation(c, "I3: |snapGlob| == t.Length", format!("{len}"), format!("{}", snap.len())));
            }
        }
    };
    let i8 = |out: &mut Vec<Violation>| {
        if let Some(z) = snap_z(n) {
            if is_power_of_2(z as u64) != is_power_of_2(n as u64) {
                out.push(violation(
                    c,
                    "I8: isPowerOf2(numZSnap(snapGlob, a.Length)) <==> isPowerOf2(a.Length)",
                    format!("both sides agree for n = {n}"),
                    format!("snapshot zeroes = {z}"),
                ));
            }
        }
    };

    match q {
        Q0 => {
            if p != 0 {
                out.push(violation(c, "I0.0: p == 0", "0".to_string(), format!("p = {p}")));
            }
            if !c.tape[..n.min(len)].iter().all(|&t| t == M2Tape::Z) {
                out.push(violation(c, "I9: t[i] == Z for 0 <= i < a.Length", "untouched input".to_string(), "tape differs".to_string()));
            }
        }
        Q1 => {
            if !(1 <= p && p <= n) {
                out.push(violation(c, "I0.1: 1 <= p <= a.Length", format!("1 <= p <= {n}"), format!("p = {p}")));
            }
            i3(&mut out);
            if let Some(snap) = snap {
                if snap.len() == len && snap[..n] != c.tape[..n] {
                    out.push(violation(c, "I1: snapGlob[i] == t[i] for 0 <= i < a.Length", "snapshot equals tape".to_string(), "they differ".to_string()));
                }
            }
            if let (Some(sz), Some(tz)) = (snap_z(p), tape_z(p)) {
                if !(sz == 1 && tz == 1) {
                    out.push(violation(c, "I5: 1 == numZSnap(snapGlob, p) == numZTape(t, p)", "1 and 1".to_string(), format!("{sz} and {tz}")));
                }
            }
            i8(&mut out);
        }
        Q2 => {
            if !(2 <= p && p <= n) {
                out.push(violation(c, "I0.2: 2 <= p <= a.Length", format!("2 <= p <= {n}"), format!("p = {p}")));
            }
            i3(&mut out);
            if let Some(snap) = snap {
                if snap.len() == len && p <= n && snap[p..n] != c.tape[p..n] {
                    out.push(violation(c, "I2: snapGlob[i] == t[i] for p <= i < a.Length", "snapshot equals tape right of head".to_string(), "they differ".to_string()));
                }
            }
            if let (Some(sz), Some(tz)) = (snap_z(p), tape_z(p)) {
                if sz != 2 * tz {
                    out.push(violation(c, "I6: numZSnap(snapGlob, p) == 2 * numZTape(t, p)", format!("{}", 2 * tz), format!("{sz}")));
                }
                if sz < 2 {
                    out.push(violation(c, "I10.2: 2 <= numZSnap(snapGlob, p)", ">= 2".to_string(), format!("{sz}")));
                }
            }
            i8(&mut out);
        }
        Q3 => {
            if !(3 <= p && p <= n) {
                out.push(violation(c, "I0.3: 3 <= p <= a.Length", format!("3 <= p <= {n}"), format!("p = {p}")));
            }
            i3(&mut out);
            if let Some(snap) = snap {
                if snap.len() == len && p <= n && snap[p..n] != c.tape[p..n] {
                    out.push(violation(c, "I2: snapGlob[i] == t[i] for p <= i < a.Length", "snapshot equals tape right of head".to_string(), "they differ".to_string()));
                }
            }
            if let (Some(sz), Some(tz)) = (snap_z(p), tape_z(p)) {
                if sz as i64 != 2 * tz as i64 - 1 {
                    out.push(violation(c, "I7: numZSnap(snapGlob, p) == 2 * numZTape(t, p) - 1", format!("{}", 2 * tz as i64 - 1), format!("{sz}")));
                }
                if sz < 3 {
                    out.push(violation(c, "I10.3: 3 <= numZSnap(snapGlob, p)", ">= 3".to_string(), format!("{sz}")));
                }
            }
            i8(&mut out);
        }
        Q4 => {
            if !(p < n) {
                out.push(violation(c, "I0.4: 0 <= p < a.Length", format!("p < {n}"), format!("p = {p}")));
            }
            i3(&mut out);
            if let (Some(sz), Some(tz)) = (snap_z(n), tape_z(n)) {
                if sz != 2 * tz {
                    out.push(violation(c, "I4: numZSnap(snapGlob, a.Length) == 2 * numZTape(t, a.Length)", format!("{}", 2 * tz), format!("{sz}")));
                }
                if sz < 2 {
                    out.push(violation(c, "I10.4: 2 <= numZSnap(snapGlob, a.Length)", ">= 2".to_string(), format!("{sz}")));
                }
            }
            i8(&mut out);
        }
        QAcc => {
            if !(2 <= p && p == n + 1) {
                out.push(violation(c, "I0.a: 2 <= p == a.Length + 1", format!("{}", n + 1), format!("p = {p}")));
            }
            i3(&mut out);
            if let Some(sz) = snap_z(n) {
                if sz != 1 {
                    out.push(violation(c, "q_acc: numZSnap(snapGlob, a.Length) == 1", "1".to_string(), format!("{sz}")));
                }
            }
            i8(&mut out);
        }
        QRej => {
            if !(1 <= p && p == n + 1) {
                out.push(violation(c, "I0.r: 1 <= p == a.Length + 1", format!("{}", n + 1), format!("p = {p}")));
            }
            if n != 0 {
                i3(&mut out);
                if let Some(sz) = snap_z(n) {
                    if sz % 2 != 1 {
                        out.push(violation(c, "q_rej: numZSnap(snapGlob, a.Length) % 2 == 1", "odd".to_string(), format!("{sz}")));
                    }
                    if sz < 3 {
                        out.push(violation(c, "I10.r: 3 <= numZSnap(snapGlob, a.Length)", ">= 3".to_string(), format!("{sz}")));
                    }
                }
                i8(&mut out);
            }
        }
    }
    out
}

/// Which checks a run-attached checker performs.
#[derive(Debug, Clone, Copy)]
pub struct M2Checks {
    pub invariants: bool,
    pub variant: bool,
}

impl Default for M2Checks {
    fn default() -> Self {
        M2Checks {
            invariants: true,
            variant: true,
        }
    }
}

/// How often the frequent assertions fired, so suites can require that they
/// actually ran.
#[derive(Debug, Clone, Copy, Default)]
pub struct M2Stats {
    pub snapshots: u64,
    pub write_locality_checks: u64,
    pub num_zeroes_lemma_checks: u64,
    pub only_zeroes_lemma_checks: u64,
    pub audits: u64,
}

struct M2Prev {
    state: M2State,
    head: usize,
    read: Option<M2Tape>,
    variant: VariantTuple,
}

/// Run sizes up to this many zeroes are audited at every configuration.
const AUDIT_ALL_MAX_N: usize = 128;
/// Beyond that, audit every this-many steps plus snapshots and the halt.
const AUDIT_STRIDE: u64 = 4096;

/// Observer that tracks the snapshot ghost and applies the invariant,
/// termination, and per-write checks at every configuration of one run.
pub struct M2RunChecker {
    n: usize,
    checks: M2Checks,
    audit_all: bool,
    pub ghost: M2Ghost,
    pub violations: Vec<Violation>,
    pub stats: M2Stats,
    prev: Option<M2Prev>,
    // Exact running counters over the live tape and snapshot.
    z_before_head: usize,   // num_z_tape(tape, head)
    z_total: usize,         // num_z_tape(tape, n)
    mismatch_total: usize,  // positions i < n where snap[i] != t[i]
    mismatch_before: usize, // positions i < min(head, n) where snap[i] != t[i]
    interior_blanks: usize, // positions 1 <= i < n where t[i] == B
}

impl M2RunChecker {
    pub fn new(input_len: usize, checks: M2Checks) -> Self {
        M2RunChecker {
            n: input_len,
            checks,
            audit_all: input_len <= AUDIT_ALL_MAX_N,
            ghost: M2Ghost::default(),
            violations: Vec::new(),
            stats: M2Stats::default(),
            prev: None,
            z_before_head: 0,
            z_total: 0,
            mismatch_total: 0,
            mismatch_before: 0,
            interior_blanks: 0,
        }
    }

    pub fn observe(&mut self, c: &Configuration<M2State, M2Tape>) {
        let n = self.n;
        if self.prev.is_none() && c.steps == 0 {
            self.z_total = num_z_tape(&c.tape, n.min(c.tape.len()));
            self.interior_blanks = c.tape[1.min(c.tape.len())..n.min(c.tape.len())]
                .iter()
                .filter(|&&t| t == M2Tape::B)
                .count();
        }
        if let Some(prev) = self.prev.take() {
            let old = prev
                .read
                .expect("a stepped-from configuration reads inside the tape");
            let new = c.tape[prev.head];
            if new != old {
                if prev.head < n {
                    self.z_total = self.z_total - is_zero_like(old) as usize
                        + is_zero_like(new) as usize;
                    if prev.head >= 1 {
                        self.interior_blanks = self.interior_blanks
                            - (old == M2Tape::B) as usize
                            + (new == M2Tape::B) as usize;
                    }
                    if let Some(snap) = self.ghost.snapshot() {
                        let sym = snap[prev.head];
                        self.mismatch_total = self.mismatch_total - (sym != old) as usize
                            + (sym != new) as usize;
                    }
                }
                // The crossing-off writes must leave the zero count strictly
                // left of the head untouched; recomputed from the raw tape.
                if matches!(prev.state, M2State::Q1 | M2State::Q3)
                    && old == M2Tape::Z
                    && new == M2Tape::X
                    && self.checks.invariants
                {
                    self.stats.write_locality_checks += 1;
                    let direct = num_z_tape(&c.tape, prev.head);
                    if direct != self.z_before_head {
                        self.violations.push(violation(
                            c,
                            "write-locality: numZTape(t, p) unchanged across write",
                            format!("{}", self.z_before_head),
                            format!("{direct}"),
                        ));
                    }
                }
            }
            // Head movement: one square enters or leaves the before-head zone.
            if c.head == prev.head + 1 {
                let sym = c.tape[prev.head];
                self.z_before_head += is_zero_like(sym) as usize;
                if prev.head < n {
                    if let Some(snap) = self.ghost.snapshot() {
                        self.mismatch_before += (snap[prev.head] != sym) as usize;
                    }
                }
            } else if c.head + 1 == prev.head {
                let sym = c.tape[c.head];
                self.z_before_head -= is_zero_like(sym) as usize;
                if c.head < n {
                    if let Some(snap) = self.ghost.snapshot() {
                        self.mismatch_before -= (snap[c.head] != sym) as usize;
                    }
                }
            }
            let took_snapshot = m2_ghost_update(prev.state, old, &mut self.ghost, &c.tape);
            if took_snapshot {
                self.stats.snapshots += 1;
                self.mismatch_total = 0;
                self.mismatch_before = 0;
                self.after_snapshot(c, prev.state);
            }
            if self.checks.variant {
                let cur = m2_variant(c, &self.ghost, n);
                if !variant_decreases(&prev.variant, &cur) {
                    self.violations.push(violation(
                        c,
                        "decreases clause",
                        "lexicographic decrease".to_string(),
                        format!("{} -> {}", prev.variant, cur),
                    ));
                }
            }
        }
        if self.checks.invariants {
            let vs = self.check_config(c);
            let halting = matches!(c.state, M2State::QAcc | M2State::QRej);
            if self.audit_all || halting || c.steps % AUDIT_STRIDE == 0 {
                self.audit(c, &vs);
            }
            self.violations.extend(vs);
        }
        if !matches!(c.state, M2State::QAcc | M2State::QRej) {
            let variant = m2_variant(c, &self.ghost, n);
            self.prev = Some(M2Prev {
                state: c.state,
                head: c.head,
                read: c.read(),
                variant,
            });
        }
    }

    /// Checks fired at every snapshot: the freshly copied snapshot must agree
    /// with the tape on every prefix zero count, and the very first snapshot
    /// (taken when leaving q0) must contain exactly `n` zeroes.
    fn after_snapshot(&mut self, c: &Configuration<M2State, M2Tape>, from: M2State) {
        if !self.checks.invariants {
            return;
        }
        let n = self.n;
        self.stats.num_zeroes_lemma_checks += 1;
        let mut z = 0usize;
        let mut agree = true;
        for i in 0..=n.min(c.tape.len()) {
            if self.ghost.snap_zeroes(i) != Some(z) {
                agree = false;
                break;
            }
            if i < n.min(c.tape.len()) {
                z += is_zero_like(c.tape[i]) as usize;
            }
        }
        if !agree {
            self.violations.push(violation(
                c,
                "numZeroesLemma: numZTape(t, i) == numZSnap(snapGlob, i) for 0 <= i <= a.Length",
                "prefix counts agree".to_string(),
                "they differ".to_string(),
            ));
        }
        if from == M2State::Q0 {
            self.stats.only_zeroes_lemma_checks += 1;
            if self.ghost.snap_zeroes(n) != Some(n) {
                self.violations.push(violation(
                    c,
                    "onlyZeroesLemma: numZSnap(snapGlob, a.Length) == a.Length",
                    format!("{n}"),
                    format!("{:?}", self.ghost.snap_zeroes(n)),
                ));
            }
        }
    }

    /// Counter-backed evaluation of the same clause catalog as
    /// `m2_check_invariants`.
    fn check_config(&self, c: &Configuration<M2State, M2Tape>) -> Vec<Violation> {
        use M2State::*;
        let mut out = Vec::new();
        let n = self.n;
        let len = c.tape.len();
        let p = c.head;
        let q = c.state;

        if p > len {
            out.push(violation(c, "I0: 0 <= p <= t.Length", format!("p <= {len}"), format!("p = {p}")));
        }
        let expected_t0 = if n == 0 || q != Q0 { M2Tape::B } else { M2Tape::Z };
        if c.tape.first() != Some(&expected_t0) {
            out.push(violation(
                c,
                "global: t[0] == (a.Length == 0 || q != q0 ? B : Z)",
                format!("{expected_t0:?}"),
                format!("{:?}", c.tape.first()),
            ));
        }
        if self.interior_blanks != 0 {
            out.push(violation(
                c,
                "global: t[i] in {Z, X} for 1 <= i < a.Length",
                "zeroes and crosses only".to_string(),
                "a blank inside the input region".to_string(),
            ));
        }
        if c.tape.get(n) != Some(&M2Tape::B) {
            out.push(violation(c, "global: t[a.Length] == B", "blank".to_string(), format!("{:?}", c.tape.get(n))));
        }

        let snap_required = match q {
            Q0 => false,
            QRej => n != 0,
            _ => true,
        };
        if snap_required && self.ghost.snapshot().is_none() {
            out.push(violation(c, "snapshot present", "snapGlob assigned".to_string(), "absent".to_string()));
        }
        let snap_z = |i: usize| self.ghost.snap_zeroes(i);
        let i3 = |out: &mut Vec<Violation>| {
            if let Some(snap) = self.ghost.snapshot() {
                if snap.len() != len {
                    out.push(violation(c, "I3: |snapGlob| == t.Length", format!("{len}"), format!("{}", snap.len())));
                }
            }
        };
        let i8 = |out: &mut Vec<Violation>| {
            if let Some(z) = snap_z(n) {
                if is_power_of_2(z as u64) != is_power_of_2(n as u64) {
                    out.push(violation(
                        c,
                        "I8: isPowerOf2(numZSnap(snapGlob, a.Length)) <==> isPowerOf2(a.Length)",
                        format!("both sides agree for n = {n}"),
                        format!("snapshot zeroes = {z}"),
                    ));
                }
            }
        };

        match q {
            Q0 => {
                if p != 0 {
                    out.push(violation(c, "I0.0: p == 0", "0".to_string(), format!("p = {p}")));
                }
                if !c.tape[..n.min(len)].iter().all(|&t| t == M2Tape::Z) {
                    out.push(violation(c, "I9: t[i] == Z for 0 <= i < a.Length", "untouched input".to_string(), "tape differs".to_string()));
                }
            }
            Q1 => {
                if !(1 <= p && p <= n) {
                    out.push(violation(c, "I0.1: 1 <= p <= a.Length", format!("1 <= p <= {n}"), format!("p = {p}")));
                }
                i3(&mut out);
                if self.ghost.snapshot().is_some() && self.mismatch_total != 0 {
                    out.push(violation(c, "I1: snapGlob[i] == t[i] for 0 <= i < a.Length", "snapshot equals tape".to_string(), "they differ".to_string()));
                }
                if let Some(sz) = snap_z(p) {
                    let tz = self.z_before_head;
                    if !(sz == 1 && tz == 1) {
                        out.push(violation(c, "I5: 1 == numZSnap(snapGlob, p) == numZTape(t, p)", "1 and 1".to_string(), format!("{sz} and {tz}")));
                    }
                }
                i8(&mut out);
            }
            Q2 => {
                if !(2 <= p && p <= n) {
                    out.push(violation(c, "I0.2: 2 <= p <= a.Length", format!("2 <= p <= {n}"), format!("p = {p}")));
                }
                i3(&mut out);
                if self.ghost.snapshot().is_some()
                    && p <= n
                    && self.mismatch_total != self.mismatch_before
                {
                    out.push(violation(c, "I2: snapGlob[i] == t[i] for p <= i < a.Length", "snapshot equals tape right of head".to_string(), "they differ".to_string()));
                }
                if let Some(sz) = snap_z(p) {
                    let tz = self.z_before_head;
                    if sz != 2 * tz {
                        out.push(violation(c, "I6: numZSnap(snapGlob, p) == 2 * numZTape(t, p)", format!("{}", 2 * tz), format!("{sz}")));
                    }
                    if sz < 2 {
                        out.push(violation(c, "I10.2: 2 <= numZSnap(snapGlob, p)", ">= 2".to_string(), format!("{sz}")));
                    }
                }
                i8(&mut out);
            }
            Q3 => {
                if !(3 <= p && p <= n) {
                    out.push(violation(c, "I0.3: 3 <= p <= a.Length", format!("3 <= p <= {n}"), format!("p = {p}")));
                }
                i3(&mut out);
                if self.ghost.snapshot().is_some()
                    && p <= n
                    && self.mismatch_total != self.mismatch_before
                {
                    out.push(violation(c, "I2: snapGlob[i] == t[i] for p <= i < a.Length", "snapshot equals tape right of head".to_string(), "they differ".to_string()));
                }
                if let Some(sz) = snap_z(p) {
                    let tz = self.z_before_head;
                    if sz as i64 != 2 * tz as i64 - 1 {
                        out.push(violation(c, "I7: numZSnap(snapGlob, p) == 2 * numZTape(t, p) - 1", format!("{}", 2 * tz as i64 - 1), format!("{sz}")));
                    }
                    if sz < 3 {
                        out.push(violation(c, "I10.3: 3 <= numZSnap(snapGlob, p)", ">= 3".to_string(), format!("{sz}")));
                    }
                }
                i8(&mut out);
            }
            Q4 => {
                if !(p < n) {
                    out.push(violation(c, "I0.4: 0 <= p < a.Length", format!("p < {n}"), format!("p = {p}")));
                }
                i3(&mut out);
                if let Some(sz) = snap_z(n) {
                    let tz = self.z_total;
                    if sz != 2 * tz {
                        out.push(violation(c, "I4: numZSnap(snapGlob, a.Length) == 2 * numZTape(t, a.Length)", format!("{}", 2 * tz), format!("{sz}")));
                    }
                    if sz < 2 {
                        out.push(violation(c, "I10.4: 2 <= numZSnap(snapGlob, a.Length)", ">= 2".to_string(), format!("{sz}")));
                    }
                }
                i8(&mut out);
            }
            QAcc => {
                if !(2 <= p && p == n + 1) {
                    out.push(violation(c, "I0.a: 2 <= p == a.Length + 1", format!("{}", n + 1), format!("p = {p}")));
                }
                i3(&mut out);
                if let Some(sz) = snap_z(n) {
                    if sz != 1 {
                        out.push(violation(c, "q_acc: numZSnap(snapGlob, a.Length) == 1", "1".to_string(), format!("{sz}")));
                    }
                }
                i8(&mut out);
            }
            QRej => {
                if !(1 <= p && p == n + 1) {
                    out.push(violation(c, "I0.r: 1 <= p == a.Length + 1", format!("{}", n + 1), format!("p = {p}")));
                }
                if n != 0 {
                    i3(&mut out);
                    if let Some(sz) = snap_z(n) {
                        if sz % 2 != 1 {
                            out.push(violation(c, "q_rej: numZSnap(snapGlob, a.Length) % 2 == 1", "odd".to_string(), format!("{sz}")));
                        }
                        if sz < 3 {
                            out.push(violation(c, "I10.r: 3 <= numZSnap(snapGlob, a.Length)", ">= 3".to_string(), format!("{sz}")));
                        }
                    }
                    i8(&mut out);
                }
            }
        }
        out
    }

    /// Cross-checks the counters and the counter-backed clause evaluation
    /// against direct recomputation from the configuration. A mismatch is a
    /// harness bug, reported under its own clause name.
    fn audit(&mut self, c: &Configuration<M2State, M2Tape>, incremental: &[Violation]) {
        self.stats.audits += 1;
        let n = self.n;
        let head_prefix = c.head.min(c.tape.len());
        let direct_z_before = num_z_tape(&c.tape, head_prefix);
        let direct_z_total = num_z_tape(&c.tape, n.min(c.tape.len()));
        let direct_interior = c.tape[1.min(c.tape.len())..n.min(c.tape.len())]
            .iter()
            .filter(|&&t| t == M2Tape::B)
            .count();
        let (direct_mm_total, direct_mm_before) = match self.ghost.snapshot() {
            Some(snap) => {
                let upto = n.min(c.tape.len()).min(snap.len());
                let total = (0..upto).filter(|&i| snap[i] != c.tape[i]).count();
                let before = (0..upto.min(c.head)).filter(|&i| snap[i] != c.tape[i]).count();
                (total, before)
            }
            None => (0, 0),
        };
        let counters_ok = direct_z_before == self.z_before_head
            && direct_z_total == self.z_total
            && direct_interior == self.interior_blanks
            && direct_mm_total == self.mismatch_total
            && direct_mm_before == self.mismatch_before;
        if !counters_ok {
            self.violations.push(violation(
                c,
                "harness-audit: counters",
                format!(
                    "z_before {direct_z_before}, z_total {direct_z_total}, interior {direct_interior}, mm {direct_mm_total}/{direct_mm_before}"
                ),
                format!(
                    "z_before {}, z_total {}, interior {}, mm {}/{}",
                    self.z_before_head,
                    self.z_total,
                    self.interior_blanks,
                    self.mismatch_total,
                    self.mismatch_before
                ),
            ));
        }
        let mut direct: Vec<String> = m2_check_invariants(c, &self.ghost, n)
            .into_iter()
            .map(|v| v.clause)
            .collect();
        let mut incr: Vec<String> = incremental.iter().map(|v| v.clause.clone()).collect();
        direct.sort();
        incr.sort();
        if direct != incr {
            self.violations.push(violation(
                c,
                "harness-audit: clause sets",
                format!("{direct:?}"),
                format!("{incr:?}"),
            ));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::{sipser_m2_machine, zeros};
    use crate::tm::{default_fuel, run_with, Decision};

    fn tape(s: &str) -> Vec<M2Tape> {
        s.chars()
            .map(|c| match c {
                '_' => M2Tape::B,
                '0' => M2Tape::Z,
                'x' => M2Tape::X,
                other => panic!("bad tape char {other}"),
            })
            .collect()
    }

    #[test]
    fn num_z_examples() {
        assert_eq!(num_z_tape(&tape("_00_"), 3), 3);
        assert_eq!(num_z_tape(&tape("_00_"), 0), 0);
        assert_eq!(num_z_snap(&tape("_x0x_"), 5), 3);
    }

    #[test]
    fn ghost_updates_take_snapshots_at_cycle_boundaries() {
        let mut g = M2Ghost::default();
        // Leaving q0 on a zero: snapshot of the post-write tape.
        assert!(m2_ghost_update(M2State::Q0, M2Tape::Z, &mut g, &tape("_00_")));
        assert_eq!(g.snapshot().unwrap(), tape("_00_").as_slice());
        assert_eq!(g.snap_zeroes(3), Some(3));

        // Self-loop on q1 carries no annotation.
        let before = g.clone();
        assert!(!m2_ghost_update(M2State::Q1, M2Tape::X, &mut g, &tape("_x0_")));
        assert_eq!(g, before);
    }

    #[test]
    fn snapshot_after_one_division_on_four_zeroes() {
        let m = sipser_m2_machine();
        let mut checker = M2RunChecker::new(4, M2Checks::default());
        run_with(&m, &zeros(4), default_fuel(4), |c| checker.observe(c)).unwrap();
        assert_eq!(checker.violations, vec![]);
        // The last snapshot (after the final division 2 -> 1) has one zero.
        assert_eq!(checker.ghost.snap_zeroes(4), Some(1));
        assert!(checker.stats.snapshots >= 2);
    }

    #[test]
    fn halving_invariant_witnessed_at_q4_on_four_zeroes() {
        let m = sipser_m2_machine();
        let mut witnessed = false;
        let mut checker = M2RunChecker::new(4, M2Checks::default());
        run_with(&m, &zeros(4), default_fuel(4), |c| {
            checker.observe(c);
            if c.state == M2State::Q4 && checker.ghost.snap_zeroes(4) == Some(4) {
                assert_eq!(num_z_tape(&c.tape, 4), 2);
                witnessed = true;
            }
        })
        .unwrap();
        assert!(witnessed, "never saw q4 under the first snapshot");
        // First division on 0000: snapshot taken when leaving q4 is _x0x_.
        assert_eq!(checker.violations, vec![]);
    }

    #[test]
    fn variant_examples_on_two_zeroes() {
        let m = sipser_m2_machine();
        let mut tuples = Vec::new();
        let mut checker = M2RunChecker::new(2, M2Checks::default());
        run_with(&m, &zeros(2), default_fuel(2), |c| {
            checker.observe(c);
            tuples.push((c.state, m2_variant(c, &checker.ghost, 2)));
        })
        .unwrap();
        assert_eq!(tuples[0].1.to_string(), "(1,NA,NA,NA)");
        assert_eq!(tuples[1].0, M2State::Q1);
        assert_eq!(tuples[1].1.to_string(), "(0,2,1,2)");
        // q2 -> q4 drops the phase component from 1 to 0.
        let q2_to_q4 = tuples.windows(2).find(|w| w[0].0 == M2State::Q2 && w[1].0 == M2State::Q4);
        assert!(q2_to_q4.is_some());
        assert_eq!(checker.violations, vec![]);
    }

    #[test]
    fn component_one_halves_across_the_rewind_on_sixteen_zeroes() {
        let m = sipser_m2_machine();
        let mut checker = M2RunChecker::new(16, M2Checks::default());
        let mut snap_counts = Vec::new();
        run_with(&m, &zeros(16), default_fuel(16), |c| {
            checker.observe(c);
            if let Some(z) = checker.ghost.snap_zeroes(16) {
                if snap_counts.last() != Some(&z) {
                    snap_counts.push(z);
                }
            }
        })
        .unwrap();
        assert_eq!(snap_counts, vec![16, 8, 4, 2, 1]);
        assert_eq!(checker.violations, vec![]);
    }

    #[test]
    fn exhaustive_small_runs_are_clean_and_match_the_reference_checker() {
        let m = sipser_m2_machine();
        for n in 0..=40 {
            let mut checker = M2RunChecker::new(n, M2Checks::default());
            let r = run_with(&m, &zeros(n), default_fuel(n), |c| {
                checker.observe(c);
                // The reference checker agrees clause-for-clause (both empty).
                assert_eq!(m2_check_invariants(c, &checker.ghost, n), vec![]);
            })
            .unwrap();
            assert_eq!(checker.violations, vec![], "n = {n}");
            assert_eq!(
                r.decision == Decision::Accept,
                crate::oracles::is_power_of_2(n as u64),
                "n = {n}"
            );
            assert_eq!(r.config.head, n + 1);
            if n >= 1 {
                assert_eq!(checker.stats.only_zeroes_lemma_checks, 1);
            }
            if n >= 2 {
                assert!(checker.stats.write_locality_checks >= 1);
            }
        }
    }

    #[test]
    fn corrupted_snapshot_is_reported() {
        let m = sipser_m2_machine();
        let n = 8;
        let mut hit = Vec::new();
        let mut checker = M2RunChecker::new(n, M2Checks::default());
        run_with(&m, &zeros(n), default_fuel(n), |c| {
            checker.observe(c);
            if c.state == M2State::Q2 && hit.is_empty() {
                // Flip one snapshot cross to a zero and re-run the reference
                // checker: the counting invariants must notice.
                let mut snap = checker.ghost.snapshot().unwrap().to_vec();
                if let Some(slot) = snap.iter().position(|&s| s == M2Tape::X) {
                    snap[slot] = M2Tape::Z;
                    let mut corrupt = M2Ghost::default();
                    corrupt.take_snapshot(&snap);
                    hit = m2_check_invariants(c, &corrupt, n);
                }
            }
        })
        .unwrap();
        assert!(
            hit.iter().any(|v| v.clause.starts_with("I2") || v.clause.starts_with("I6")),
            "expected an I2 or I6 violation, got {hit:?}"
        );
    }

    #[test]
    fn injected_table_fault_is_caught_by_the_invariants() {
        use crate::tm::{Action, Dir};
        // Make q3 keep zeroes instead of crossing them off: reading Z in q3
        // now writes Z. The halving arithmetic collapses.
        let m = sipser_m2_machine().with_transition(
            M2State::Q3,
            M2Tape::Z,
            Action {
                write: M2Tape::Z,
                dir: Dir::Right,
                next: M2State::Q2,
            },
        );
        let n = 4;
        let mut checker = M2RunChecker::new(n, M2Checks::default());
        let _ = run_with(&m, &zeros(n), default_fuel(n), |c| checker.observe(c));
        assert!(
            !checker.violations.is_empty(),
            "sabotaged machine ran clean"
        );
        assert!(checker
            .violations
            .iter()
            .all(|v| !v.clause.starts_with("harness-audit")));
    }
}
