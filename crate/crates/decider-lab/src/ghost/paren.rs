//! Ghost instrumentation for the parentheses machine.
//!
//! Six ghost variables ride along with a run: `k` counts fully handled
//! parentheses (equal to the marking-symbol position while one is on the
//! tape), `s` counts stack symbols, `lp`/`rp` count parentheses seen by the
//! head, and `s_p`/`k_p` (written s' and k' in reports) hold their difference
//! and sum. Updates fire on (pre-state, read symbol) events, mirroring the
//! edge annotations of the transition diagram, so the harness never looks
//! inside the interpreter.

use crate::ghost::{variant_decreases, Component, VariantTuple, Violation};
use crate::machines::{embed_paren, ParenState, ParenSym, ParenTape};
use crate::oracles::left_minus_right;
use crate::tm::{Configuration, StateId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ParenGhost {
    /// Parentheses fully handled; position of the marking symbol when present.
    pub k: usize,
    /// Stack symbols currently on the tape.
    pub s: usize,
    /// s' = lp - rp.
    pub s_p: i64,
    /// k' = lp + rp.
    pub k_p: usize,
    /// Left parentheses seen by the head in state q0.
    pub lp: usize,
    /// Right parentheses seen by the head in state q0.
    pub rp: usize,
}

/// Applies the ghost annotations of one transition, keyed by the
/// (pre-state, read symbol) event. All other events are the identity.
pub fn paren_ghost_update(state: ParenState, read: ParenTape, g: &ParenGhost) -> ParenGhost {
    use ParenState::*;
    use ParenTape::*;
    let mut g = *g;
    match (state, read) {
        (Q0, L) => {
            g.lp += 1;
            g.k_p += 1;
            g.s_p += 1;
        }
        (Q0, R) => {
            g.rp += 1;
            g.k_p += 1;
            g.s_p -= 1;
        }
        (Q1, B) => g.s += 1,
        (Q2, X) => g.k += 1,
        (Q4, S) => g.s -= 1,
        (Q5, X) => g.k += 1,
        _ => {}
    }
    g
}

/// Tape shape with no marking symbol: the embedded input word, then `s`
/// stack symbols, then blanks.
pub fn tape_contents_without_x(input: &[ParenSym], tape: &[ParenTape], s: usize) -> bool {
    let n = input.len();
    assert_eq!(tape.len(), 2 * n + 1, "tape length must be 2n+1");
    assert!(s <= n, "stack count out of range");
    input
        .iter()
        .enumerate()
        .all(|(i, &sym)| tape[i] == embed_paren(sym))
        && tape[n..n + s].iter().all(|&t| t == ParenTape::S)
        && tape[n + s..].iter().all(|&t| t == ParenTape::B)
}

/// Tape shape with exactly one marking symbol at position `k`, standing in
/// for the input symbol `paren` there.
pub fn tape_contents_with_x_replacing(
    paren: ParenSym,
    input: &[ParenSym],
    tape: &[ParenTape],
    k: usize,
    s: usize,
) -> bool {
    let n = input.len();
    assert_eq!(tape.len(), 2 * n + 1, "tape length must be 2n+1");
    assert!(k < n, "marking position out of range");
    assert!(s <= n, "stack count out of range");
    input[k] == paren
        && input
            .iter()
            .enumerate()
            .all(|(i, &sym)| i == k || tape[i] == embed_paren(sym))
        && tape[k] == ParenTape::X
        && tape[n..n + s].iter().all(|&t| t == ParenTape::S)
        && tape[n + s..].iter().all(|&t| t == ParenTape::B)
}

/// Progress rank of a control state inside one parenthesis-handling round.
pub fn order_q(state: ParenState) -> u32 {
    use ParenState::*;
    match state {
        Q0 => 0,
        Q1 => 1,
        Q2 => 2,
        Q3 => 1,
        Q4 => 2,
        Q5 => 3,
        QAcc => 1,
        QRej => 3,
    }
}

/// The three-component termination measure: parentheses still to handle,
/// state progress, and head progress (rightward in q1/q3, leftward elsewhere).
pub fn paren_variant(
    c: &Configuration<ParenState, ParenTape>,
    g: &ParenGhost,
    input: &[ParenSym],
) -> VariantTuple {
    use ParenState::*;
    let head_component = if matches!(c.state, Q1 | Q3) {
        c.tape.len() as i64 - c.head as i64
    } else {
        c.head as i64
    };
    VariantTuple(vec![
        Component::Applicable(input.len() as i64 - g.k as i64),
        Component::Applicable(3 - order_q(c.state) as i64),
        Component::Applicable(head_component),
    ])
}

/// Prefix data for one input word, so the per-configuration checks stay
/// cheap inside the exhaustive suites.
pub(crate) struct ParenCtx<'a> {
    pub input: &'a [ParenSym],
    /// lmr[i] = left_minus_right(input, i).
    lmr: Vec<i64>,
    /// min_lmr[i] = min over j <= i of lmr[j].
    min_lmr: Vec<i64>,
}

impl<'a> ParenCtx<'a> {
    pub fn new(input: &'a [ParenSym]) -> Self {
        let mut lmr = Vec::with_capacity(input.len() + 1);
        let mut min_lmr = Vec::with_capacity(input.len() + 1);
        let mut d = 0i64;
        let mut min = 0i64;
        lmr.push(0);
        min_lmr.push(0);
        for &sym in input {
            d += match sym {
                ParenSym::LP => 1,
                ParenSym::RP => -1,
            };
            min = min.min(d);
            lmr.push(d);
            min_lmr.push(min);
        }
        ParenCtx { input, lmr, min_lmr }
    }

    fn lmr(&self, i: usize) -> Option<i64> {
        self.lmr.get(i).copied()
    }

    fn never_more(&self, i: usize) -> Option<bool> {
        self.min_lmr.get(i).map(|&m| m >= 0)
    }
}

fn push_violation(
    out: &mut Vec<Violation>,
    c: &Configuration<ParenState, ParenTape>,
    clause: &str,
    expected: String,
    actual: String,
) {
    out.push(Violation::new(c.steps, c.state.name(), clause, expected, actual));
}

/// Evaluates the full invariant catalog at one configuration: the global
/// counting invariants, the crucial left-minus-right and never-more
/// invariants, and the per-state block for the current control state.
pub fn paren_check_invariants(
    c: &Configuration<ParenState, ParenTape>,
    g: &ParenGhost,
    input: &[ParenSym],
) -> Vec<Violation> {
    check_invariants_ctx(&ParenCtx::new(input), c, g)
}

pub(crate) fn check_invariants_ctx(
    ctx: &ParenCtx<'_>,
    c: &Configuration<ParenState, ParenTape>,
    g: &ParenGhost,
) -> Vec<Violation> {
    use ParenState::*;
    let mut out = Vec::new();
    let input = ctx.input;
    let n = input.len() as i64;
    let len = c.tape.len() as i64;
    let p = c.head as i64;
    let (k, s) = (g.k as i64, g.s as i64);
    let (sp, kp) = (g.s_p, g.k_p as i64);
    let (lp, rp) = (g.lp as i64, g.rp as i64);

    // Globals.
    if p > len {
        push_violation(&mut out, c, "global: 0 <= p <= t.Length", format!("p <= {len}"), format!("p = {p}"));
    }
    if sp != lp - rp {
        push_violation(&mut out, c, "global: s' == lp - rp", format!("{}", lp - rp), format!("s' = {sp}"));
    }
    if kp != lp + rp {
        push_violation(&mut out, c, "global: k' == lp + rp", format!("{}", lp + rp), format!("k' = {kp}"));
    }
    if !(-1 <= sp && sp <= kp) {
        push_violation(&mut out, c, "global: -1 <= s' <= k'", format!("-1 <= s' <= {kp}"), format!("s' = {sp}"));
    }
    if kp > n {
        push_violation(&mut out, c, "global: 0 <= k' <= a.Length", format!("k' <= {n}"), format!("k' = {kp}"));
    }
    if let Some(expected) = ctx.lmr(g.k_p) {
        if sp != expected {
            push_violation(
                &mut out,
                c,
                "left-minus-right: s' == leftMinusRightParen(a, k')",
                format!("{expected}"),
                format!("s' = {sp}"),
            );
        }
    }
    if let Some(holds) = ctx.never_more(g.k) {
        if !holds {
            push_violation(
                &mut out,
                c,
                "never-more: neverMoreRightThanLeftParen(a, k)",
                "all prefixes up to k balanced-or-left-heavy".to_string(),
                format!("k = {k}"),
            );
        }
    }
    if let Some(v) = ctx.lmr(g.k) {
        if v < 0 {
            push_violation(
                &mut out,
                c,
                "global: 0 <= leftMinusRightParen(a, k)",
                ">= 0".to_string(),
                format!("{v}"),
            );
        }
    }

    // Per-state block. Range clauses come first; the tape-shape predicate
    // only runs when its preconditions (the ranges) hold.
    let range = |cond: bool, out: &mut Vec<Violation>, clause: &str, expected: String, actual: String| {
        if !cond {
            push_violation(out, c, clause, expected, actual);
        }
        cond
    };
    let without_x_ok = |s: i64| s >= 0 && s <= n;
    let with_x_ok = |k: i64, s: i64| k >= 0 && k < n && s >= 0 && s <= n;

    match c.state {
        Q0 => {
            let s_ok = range(s >= 0 && s <= n, &mut out, "q0: 0 <= s <= a.Length", format!("0 <= s <= {n}"), format!("s = {s}"));
            range(k >= 0 && k <= n, &mut out, "q0: 0 <= k <= a.Length", format!("0 <= k <= {n}"), format!("k = {k}"));
            if s_ok && without_x_ok(s) && !tape_contents_without_x(input, &c.tape, g.s) {
                push_violation(&mut out, c, "q0: tapeContentsWithoutX(a, t, s)", format!("input, {s} stack symbols, blanks"), "tape differs".to_string());
            }
            range(k == p, &mut out, "q0: k == p", format!("k = p = {p}"), format!("k = {k}"));
            range(sp == s, &mut out, "q0: s' == s", format!("{s}"), format!("s' = {sp}"));
            range(kp == k, &mut out, "q0: k' == k", format!("{k}"), format!("k' = {kp}"));
            // Ghost/real agreement, recounted directly from the tape.
            let s_on_tape = c.tape.iter().filter(|&&t| t == ParenTape::S).count() as i64;
            range(s == s_on_tape, &mut out, "q0: s == #S on tape", format!("{s_on_tape}"), format!("s = {s}"));
        }
        Q1 => {
            range(s >= 0 && s < n, &mut out, "q1: 0 <= s < a.Length", format!("0 <= s < {n}"), format!("s = {s}"));
            range(k >= 0 && k < n, &mut out, "q1: 0 <= k < a.Length", format!("0 <= k < {n}"), format!("k = {k}"));
            if with_x_ok(k, s) && !tape_contents_with_x_replacing(ParenSym::LP, input, &c.tape, g.k, g.s) {
                push_violation(&mut out, c, "q1: tapeContentsWithXReplacing(LP, a, t, k, s)", "marked input, stack, blanks".to_string(), "tape differs".to_string());
            }
            range(k < p && p <= n + s, &mut out, "q1: k < p <= a.Length + s", format!("{k} < p <= {}", n + s), format!("p = {p}"));
            range(sp == s + 1, &mut out, "q1: s' == s + 1", format!("{}", s + 1), format!("s' = {sp}"));
            range(kp == k + 1, &mut out, "q1: k' == k + 1", format!("{}", k + 1), format!("k' = {kp}"));
        }
        Q2 => {
            range(s > 0 && s <= n, &mut out, "q2: 0 < s <= a.Length", format!("0 < s <= {n}"), format!("s = {s}"));
            range(k >= 0 && k < n, &mut out, "q2: 0 <= k < a.Length", format!("0 <= k < {n}"), format!("k = {k}"));
            if with_x_ok(k, s) && !tape_contents_with_x_replacing(ParenSym::LP, input, &c.tape, g.k, g.s) {
                push_violation(&mut out, c, "q2: tapeContentsWithXReplacing(LP, a, t, k, s)", "marked input, stack, blanks".to_string(), "tape differs".to_string());
            }
            range(k <= p && p < n + s - 1, &mut out, "q2: k <= p < a.Length + s - 1", format!("{k} <= p < {}", n + s - 1), format!("p = {p}"));
            range(sp == s, &mut out, "q2: s' == s", format!("{s}"), format!("s' = {sp}"));
            range(kp == k + 1, &mut out, "q2: k' == k + 1", format!("{}", k + 1), format!("k' = {kp}"));
        }
        Q3 => {
            range(s >= 0 && s < n, &mut out, "q3: 0 <= s < a.Length", format!("0 <= s < {n}"), format!("s = {s}"));
            range(k >= 0 && k < n, &mut out, "q3: 0 <= k < a.Length", format!("0 <= k < {n}"), format!("k = {k}"));
            if with_x_ok(k, s) && !tape_contents_with_x_replacing(ParenSym::RP, input, &c.tape, g.k, g.s) {
                push_violation(&mut out, c, "q3: tapeContentsWithXReplacing(RP, a, t, k, s)", "marked input, stack, blanks".to_string(), "tape differs".to_string());
            }
            range(k < p && p <= n + s, &mut out, "q3: k < p <= a.Length + s", format!("{k} < p <= {}", n + s), format!("p = {p}"));
            range(sp == s - 1, &mut out, "q3: s' == s - 1", format!("{}", s - 1), format!("s' = {sp}"));
            range(kp == k + 1, &mut out, "q3: k' == k + 1", format!("{}", k + 1), format!("k' = {kp}"));
        }
        Q4 => {
            range(s >= 0 && s < n, &mut out, "q4: 0 <= s < a.Length", format!("0 <= s < {n}"), format!("s = {s}"));
            range(k >= 0 && k < n, &mut out, "q4: 0 <= k < a.Length", format!("0 <= k < {n}"), format!("k = {k}"));
            if with_x_ok(k, s) && !tape_contents_with_x_replacing(ParenSym::RP, input, &c.tape, g.k, g.s) {
                push_violation(&mut out, c, "q4: tapeContentsWithXReplacing(RP, a, t, k, s)", "marked input, stack, blanks".to_string(), "tape differs".to_string());
            }
            range(p == n + s - 1, &mut out, "q4: p == a.Length + s - 1", format!("{}", n + s - 1), format!("p = {p}"));
            range(sp == s - 1, &mut out, "q4: s' == s - 1", format!("{}", s - 1), format!("s' = {sp}"));
            range(kp == k + 1, &mut out, "q4: k' == k + 1", format!("{}", k + 1), format!("k' = {kp}"));
        }
        Q5 => {
            range(s >= 0 && s < n, &mut out, "q5: 0 <= s < a.Length", format!("0 <= s < {n}"), format!("s = {s}"));
            range(k > 0 && k < n, &mut out, "q5: 0 < k < a.Length", format!("0 < k < {n}"), format!("k = {k}"));
            if with_x_ok(k, s) && !tape_contents_with_x_replacing(ParenSym::RP, input, &c.tape, g.k, g.s) {
                push_violation(&mut out, c, "q5: tapeContentsWithXReplacing(RP, a, t, k, s)", "marked input, stack, blanks".to_string(), "tape differs".to_string());
            }
            range(k <= p && p < n + s, &mut out, "q5: k <= p < a.Length + s", format!("{k} <= p < {}", n + s), format!("p = {p}"));
            range(sp == s, &mut out, "q5: s' == s", format!("{s}"), format!("s' = {sp}"));
            range(kp == k + 1, &mut out, "q5: k' == k + 1", format!("{}", k + 1), format!("k' = {kp}"));
        }
        QAcc => {
            range(s == 0, &mut out, "q_acc: 0 == s", "s = 0".to_string(), format!("s = {s}"));
            range(k == n, &mut out, "q_acc: k == a.Length", format!("{n}"), format!("k = {k}"));
            if !tape_contents_without_x(input, &c.tape, 0) {
                push_violation(&mut out, c, "q_acc: tapeContentsWithoutX(a, t, 0)", "restored input, blanks".to_string(), "tape differs".to_string());
            }
            range(p == n + 1, &mut out, "q_acc: p == a.Length + 1", format!("{}", n + 1), format!("p = {p}"));
            range(sp == s, &mut out, "q_acc: s' == s", format!("{s}"), format!("s' = {sp}"));
            range(kp == k, &mut out, "q_acc: k' == k", format!("{k}"), format!("k' = {kp}"));
        }
        QRej => {
            let (via_q0, via_q4) = reject_disjuncts(ctx.input, &c.tape, g, c.head);
            if !via_q0 && !via_q4 {
                push_violation(
                    &mut out,
                    c,
                    "q_rej: via-q0 or via-q4",
                    "one reject disjunct holds".to_string(),
                    format!("s = {s}, k = {k}, p = {p}"),
                );
            }
        }
    }
    out
}

/// The two shapes a rejecting configuration can have: all input handled with
/// stack symbols left over (reached through q0), or a failed pop with the
/// marking symbol still on the tape (reached through q4).
fn reject_disjuncts(
    input: &[ParenSym],
    tape: &[ParenTape],
    g: &ParenGhost,
    head: usize,
) -> (bool, bool) {
    let n = input.len();
    let via_q0 = g.s > 0
        && g.k == n
        && g.s <= n
        && tape_contents_without_x(input, tape, g.s)
        && head == n + 1
        && g.s_p == g.s as i64
        && g.k_p == g.k;
    let via_q4 = g.s == 0
        && g.k < n
        && tape_contents_with_x_replacing(ParenSym::RP, input, tape, g.k, 0)
        && head == n
        && g.s_p == g.s as i64 - 1
        && g.k_p == g.k + 1;
    (via_q0, via_q4)
}

/// How a halted run presented itself; rejecting runs record which disjunct
/// of the reject invariant matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FinalRoute {
    Accept,
    RejectViaQ0,
    RejectViaQ4,
}

/// Halting postconditions: what the tape, ghosts, and counting functions
/// must look like once the machine stops.
pub fn paren_check_final(
    c: &Configuration<ParenState, ParenTape>,
    g: &ParenGhost,
    input: &[ParenSym],
) -> Vec<Violation> {
    use ParenState::*;
    assert!(
        matches!(c.state, QAcc | QRej),
        "final check requires a halting configuration"
    );
    let mut out = Vec::new();
    let n = input.len() as i64;
    let (k, s) = (g.k as i64, g.s as i64);
    match c.state {
        QAcc => {
            if s != 0 {
                push_violation(&mut out, c, "final accept: 0 == s", "0".into(), format!("s = {s}"));
            }
            if k != n {
                push_violation(&mut out, c, "final accept: k == a.Length", format!("{n}"), format!("k = {k}"));
            }
            if !tape_contents_without_x(input, &c.tape, 0) {
                push_violation(&mut out, c, "final accept: tapeContentsWithoutX(a, t, 0)", "restored input, blanks".into(), "tape differs".into());
            }
            if left_minus_right(input, input.len()) != 0 {
                push_violation(&mut out, c, "final accept: 0 == leftMinusRightParen(a, a.Length)", "0".into(), format!("{}", left_minus_right(input, input.len())));
            }
            if input.len() % 2 != 0 {
                push_violation(&mut out, c, "final accept: a.Length % 2 == 0", "even length".into(), format!("length {n}"));
            }
        }
        QRej => {
            let via_q0 = g.s > 0
                && s <= n
                && k == n
                && k > 0
                && tape_contents_without_x(input, &c.tape, g.s)
                && left_minus_right(input, input.len()) > 0;
            let via_q4 = g.s == 0
                && n > 0
                && (g.k as i64) < n
                && tape_contents_with_x_replacing(ParenSym::RP, input, &c.tape, g.k, 0)
                && left_minus_right(input, g.k + 1) == -1;
            if !via_q0 && !via_q4 {
                push_violation(
                    &mut out,
                    c,
                    "final reject: via-q0 or via-q4",
                    "one reject postcondition holds".into(),
                    format!("s = {s}, k = {k}, lmr(a, |a|) = {}", left_minus_right(input, input.len())),
                );
            }
        }
        _ => unreachable!(),
    }
    out
}

/// Which postcondition shape a halted configuration matches, if any.
pub fn final_route(
    c: &Configuration<ParenState, ParenTape>,
    g: &ParenGhost,
    input: &[ParenSym],
) -> Option<FinalRoute> {
    match c.state {
        ParenState::QAcc => Some(FinalRoute::Accept),
        ParenState::QRej => {
            let (via_q0, via_q4) = reject_disjuncts(input, &c.tape, g, c.head);
            match (via_q0, via_q4) {
                (true, _) => Some(FinalRoute::RejectViaQ0),
                (_, true) => Some(FinalRoute::RejectViaQ4),
                _ => None,
            }
        }
        _ => None,
    }
}

/// Which checks a run-attached checker performs.
#[derive(Debug, Clone, Copy)]
pub struct ParenChecks {
    pub invariants: bool,
    pub variant: bool,
    pub final_post: bool,
    /// Collect the (k, leftMinusRight(a, k) >= 0) trace for the
    /// accumulated-invariant check. Off by default.
    pub accumulated: bool,
}

impl Default for ParenChecks {
    fn default() -> Self {
        ParenChecks {
            invariants: true,
            variant: true,
            final_post: true,
            accumulated: false,
        }
    }
}

struct PrevStep {
    state: ParenState,
    read: Option<ParenTape>,
    variant: VariantTuple,
}

/// Observer that tracks ghosts and applies the selected checks at every
/// configuration of one run. Attach via `tm::run_with`.
pub struct ParenRunChecker<'a> {
    ctx: ParenCtx<'a>,
    checks: ParenChecks,
    pub ghost: ParenGhost,
    pub violations: Vec<Violation>,
    pub route: Option<FinalRoute>,
    pub accumulated_trace: Vec<(usize, bool)>,
    prev: Option<PrevStep>,
}

impl<'a> ParenRunChecker<'a> {
    pub fn new(input: &'a [ParenSym], checks: ParenChecks) -> Self {
        ParenRunChecker {
            ctx: ParenCtx::new(input),
            checks,
            ghost: ParenGhost::default(),
            violations: Vec::new(),
            route: None,
            accumulated_trace: Vec::new(),
            prev: None,
        }
    }

    pub fn observe(&mut self, c: &Configuration<ParenState, ParenTape>) {
        if let Some(prev) = self.prev.take() {
            let read = prev
                .read
                .expect("a stepped-from configuration reads inside the tape");
            self.ghost = paren_ghost_update(prev.state, read, &self.ghost);
            if self.checks.variant {
                let cur = paren_variant(c, &self.ghost, self.ctx.input);
                if !variant_decreases(&prev.variant, &cur) {
                    self.violations.push(Violation::new(
                        c.steps,
                        c.state.name(),
                        "decreases clause",
                        "lexicographic decrease".to_string(),
                        format!("{} -> {}", prev.variant, cur),
                    ));
                }
            }
        }
        if self.checks.invariants {
            let vs = check_invariants_ctx(&self.ctx, c, &self.ghost);
            self.violations.extend(vs);
        }
        if self.checks.accumulated {
            let holds = self.ctx.lmr(self.ghost.k).is_some_and(|v| v >= 0);
            self.accumulated_trace.push((self.ghost.k, holds));
        }
        if matches!(c.state, ParenState::QAcc | ParenState::QRej) {
            if self.checks.final_post {
                let vs = paren_check_final(c, &self.ghost, self.ctx.input);
                self.violations.extend(vs);
            }
            self.route = final_route(c, &self.ghost, self.ctx.input);
        } else {
            let variant = paren_variant(c, &self.ghost, self.ctx.input);
            self.prev = Some(PrevStep {
                state: c.state,
                read: c.read(),
                variant,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::{parentheses_machine, parse_paren_word, paren_words_up_to};
    use crate::tm::{default_fuel, run_with, Decision};

    fn w(s: &str) -> Vec<ParenSym> {
        parse_paren_word(s).unwrap()
    }

    fn tape(s: &str) -> Vec<ParenTape> {
        s.chars()
            .map(|c| match c {
                '_' => ParenTape::B,
                '(' => ParenTape::L,
                ')' => ParenTape::R,
                'x' => ParenTape::X,
                '$' => ParenTape::S,
                other => panic!("bad tape char {other}"),
            })
            .collect()
    }

    #[test]
    fn ghost_update_examples() {
        let g0 = ParenGhost::default();
        let g = paren_ghost_update(ParenState::Q0, ParenTape::L, &g0);
        assert_eq!((g.lp, g.k_p, g.s_p, g.rp, g.k, g.s), (1, 1, 1, 0, 0, 0));

        // Self-loops carry no annotation.
        assert_eq!(paren_ghost_update(ParenState::Q1, ParenTape::L, &g), g);

        let mut g = ParenGhost {
            s: 1,
            ..ParenGhost::default()
        };
        g = paren_ghost_update(ParenState::Q4, ParenTape::S, &g);
        assert_eq!(g.s, 0);
    }

    #[test]
    fn tape_contents_without_x_examples() {
        assert!(tape_contents_without_x(&w("()"), &tape("()___"), 0));
        assert!(tape_contents_without_x(&w("(("), &tape("(($$_"), 2));
        assert!(!tape_contents_without_x(&w("(("), &tape("(($$_"), 1));
    }

    #[test]
    fn tape_contents_with_x_examples() {
        assert!(tape_contents_with_x_replacing(
            ParenSym::LP,
            &w("(("),
            &tape("x(___"),
            0,
            0
        ));
        assert!(!tape_contents_with_x_replacing(
            ParenSym::RP,
            &w("(("),
            &tape("x(___"),
            0,
            0
        ));
        assert!(tape_contents_with_x_replacing(
            ParenSym::RP,
            &w(")"),
            &tape("x__"),
            0,
            0
        ));
    }

    #[test]
    fn order_q_table() {
        use ParenState::*;
        let table = [
            (Q0, 0),
            (Q1, 1),
            (Q2, 2),
            (Q3, 1),
            (Q4, 2),
            (Q5, 3),
            (QAcc, 1),
            (QRej, 3),
        ];
        for (q, expected) in table {
            assert_eq!(order_q(q), expected, "{q:?}");
        }
    }

    #[test]
    fn variant_examples_on_two_left_parens() {
        let m = parentheses_machine();
        let input = w("((");
        let c0 = crate::tm::start_configuration(&m, &input);
        let g = ParenGhost::default();
        let v0 = paren_variant(&c0, &g, &input);
        assert_eq!(v0.to_string(), "(2,3,0)");

        let c1 = match crate::tm::step(&m, c0).unwrap() {
            crate::tm::StepOutcome::Continue(c) => c,
            other => panic!("{other:?}"),
        };
        let g1 = paren_ghost_update(ParenState::Q0, ParenTape::L, &g);
        let v1 = paren_variant(&c1, &g1, &input);
        assert_eq!(v1.to_string(), "(2,2,4)");
        assert!(variant_decreases(&v0, &v1));
    }

    #[test]
    fn fig4_row4_configuration_satisfies_the_q2_block() {
        let input = w("((");
        let c = Configuration {
            state: ParenState::Q2,
            tape: tape("x($__"),
            head: 1,
            steps: 3,
        };
        let g = ParenGhost {
            k: 0,
            s: 1,
            s_p: 1,
            k_p: 1,
            lp: 1,
            rp: 0,
        };
        assert_eq!(paren_check_invariants(&c, &g, &input), vec![]);
    }

    #[test]
    fn accept_block_passes_and_detects_injected_fault() {
        let input = w("(())()");
        let c = Configuration {
            state: ParenState::QAcc,
            tape: tape("(())()_______"),
            head: 7,
            steps: 59,
        };
        let g = ParenGhost {
            k: 6,
            s: 0,
            s_p: 0,
            k_p: 6,
            lp: 3,
            rp: 3,
        };
        assert_eq!(paren_check_invariants(&c, &g, &input), vec![]);

        let bad = ParenGhost { s: 1, ..g };
        let violations = paren_check_invariants(&c, &bad, &input);
        assert!(
            violations.iter().any(|v| v.clause == "q_acc: 0 == s"),
            "got {violations:?}"
        );
    }

    fn with_checked_run(word: &str, f: impl FnOnce(Decision, &ParenRunChecker<'_>, &[ParenSym])) {
        let input = w(word);
        let mut checker = ParenRunChecker::new(
            &input,
            ParenChecks {
                accumulated: true,
                ..ParenChecks::default()
            },
        );
        let m = parentheses_machine();
        let r = run_with(&m, &input, default_fuel(input.len()), |c| checker.observe(c)).unwrap();
        f(r.decision, &checker, &input);
    }

    #[test]
    fn final_postconditions_on_the_three_spec_runs() {
        with_checked_run("(())()", |d, checker, _| {
            assert_eq!(d, Decision::Accept);
            assert_eq!(checker.violations, vec![]);
            assert_eq!(checker.route, Some(FinalRoute::Accept));
        });
        with_checked_run("((", |d, checker, _| {
            assert_eq!(d, Decision::Reject);
            assert_eq!(checker.violations, vec![]);
            assert_eq!(checker.route, Some(FinalRoute::RejectViaQ0));
            assert_eq!(checker.ghost.s, 2);
        });
        with_checked_run(")", |d, checker, input| {
            assert_eq!(d, Decision::Reject);
            assert_eq!(checker.violations, vec![]);
            assert_eq!(checker.route, Some(FinalRoute::RejectViaQ4));
            assert_eq!(checker.ghost.k, 0);
            assert_eq!(left_minus_right(input, 1), -1);
        });
    }

    #[test]
    fn all_words_up_to_length_8_run_clean() {
        let m = parentheses_machine();
        for input in paren_words_up_to(8) {
            let mut checker = ParenRunChecker::new(
                &input,
                ParenChecks {
                    accumulated: true,
                    ..ParenChecks::default()
                },
            );
            run_with(&m, &input, default_fuel(input.len()), |c| checker.observe(c)).unwrap();
            assert_eq!(
                checker.violations,
                vec![],
                "word {:?}",
                crate::machines::render_paren_word(&input)
            );
            assert!(crate::ghost::accumulated_invariant_check(
                &checker.accumulated_trace
            ));
        }
    }
}
