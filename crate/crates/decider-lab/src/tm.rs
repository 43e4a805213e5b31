//! The single-tape machine model: definitions, configurations, stepping, and
//! bounded runs.
//!
//! The tape is preallocated at a machine-specific size and never grows. A head
//! that would read past the end of the tape in a non-halting state is a
//! [`RunError::TapeOverrun`], which turns the tape-size policy (`2n+1` for the
//! parentheses machine, `n+1` for the powers-of-two machine) into a checked
//! claim instead of an implementation convenience.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use thiserror::Error;

/// Head movement in the monolithic model. A left move at the start of the
/// tape stays put; it is never an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Left,
    Right,
}

/// Control states. `name` is the identifier shown in traces and reports.
pub trait StateId: Copy + Eq + Hash + fmt::Debug + 'static {
    fn name(&self) -> &'static str;
}

/// Tape symbols. `render` is the single character used in traces.
pub trait TapeSym: Copy + Eq + Hash + fmt::Debug + 'static {
    fn render(&self) -> char;
}

/// What firing a transition does: write a symbol, move the head, enter a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Action<Q, S> {
    pub write: S,
    pub dir: Dir,
    pub next: Q,
}

/// A monolithic machine: state set, distinguished states, blank symbol,
/// partial transition table, tape-size policy and input embedding.
///
/// The table is deliberately partial: a `(state, symbol)` pair without an
/// entry is *dead*, and firing it is a hard [`RunError::DeadTransition`],
/// never a silent reject.
pub struct MachineDef<Q, I, S> {
    pub name: &'static str,
    pub states: Vec<Q>,
    pub start: Q,
    pub accept: Q,
    pub reject: Q,
    pub blank: S,
    transitions: HashMap<(Q, S), Action<Q, S>>,
    pub tape_size: fn(usize) -> usize,
    pub input_embed: fn(I) -> S,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DefError {
    #[error("accept and reject states must differ")]
    AcceptEqualsReject,
    #[error("state {0} is not in the state set")]
    UnknownState(String),
    #[error("transition source {0} is a halting state")]
    HaltingSource(String),
}

impl<Q: StateId, I, S: TapeSym> MachineDef<Q, I, S> {
    pub fn new(
        name: &'static str,
        states: Vec<Q>,
        start: Q,
        accept: Q,
        reject: Q,
        blank: S,
        transitions: Vec<(Q, S, Action<Q, S>)>,
        tape_size: fn(usize) -> usize,
        input_embed: fn(I) -> S,
    ) -> Result<Self, DefError> {
        if accept == reject {
            return Err(DefError::AcceptEqualsReject);
        }
        for q in [start, accept, reject] {
            if !states.contains(&q) {
                return Err(DefError::UnknownState(q.name().to_string()));
            }
        }
        let mut table = HashMap::new();
        for (q, s, action) in transitions {
            if q == accept || q == reject {
                return Err(DefError::HaltingSource(q.name().to_string()));
            }
            if !states.contains(&q) || !states.contains(&action.next) {
                return Err(DefError::UnknownState(q.name().to_string()));
            }
            table.insert((q, s), action);
        }
        Ok(MachineDef {
            name,
            states,
            start,
            accept,
            reject,
            blank,
            transitions: table,
            tape_size,
            input_embed,
        })
    }

    pub fn is_halting(&self, q: Q) -> bool {
        q == self.accept || q == self.reject
    }

    /// Table lookup; `None` means the pair is dead.
    pub fn lookup(&self, q: Q, s: S) -> Option<Action<Q, S>> {
        self.transitions.get(&(q, s)).copied()
    }

    pub fn live_transition_count(&self) -> usize {
        self.transitions.len()
    }

    /// Replace (or install) one table entry. Used to inject faults for
    /// negative tests of the checkers.
    pub fn with_transition(mut self, q: Q, s: S, action: Action<Q, S>) -> Self {
        self.transitions.insert((q, s), action);
        self
    }

    /// Remove one table entry, turning the pair dead.
    pub fn without_transition(mut self, q: Q, s: S) -> Self {
        self.transitions.remove(&(q, s));
        self
    }
}

/// A machine's complete instantaneous state. `head` may equal the tape
/// length (the virtual square one past the end); that is legal only in
/// halting states, which the ghost harness checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration<Q, S> {
    pub state: Q,
    pub tape: Vec<S>,
    pub head: usize,
    pub steps: u64,
}

impl<Q, S: Copy> Configuration<Q, S> {
    /// Symbol under the head, absent when the head sits on the virtual square.
    pub fn read(&self) -> Option<S> {
        self.tape.get(self.head).copied()
    }
}

/// Result of one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome<Q, S> {
    Continue(Configuration<Q, S>),
    /// Returned exactly when the incoming state is accept or reject.
    Halted(Configuration<Q, S>),
    DeadTransition { state: Q, symbol: S, head: usize },
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RunError {
    #[error("dead transition at step {step}: state {state} reading '{symbol}' at head {head}")]
    DeadTransition {
        state: &'static str,
        symbol: char,
        head: usize,
        step: u64,
    },
    #[error("tape overrun at step {step}: head {head} = tape length in non-halting state {state}")]
    TapeOverrun {
        state: &'static str,
        head: usize,
        step: u64,
    },
    #[error("fuel exhausted after {fuel} steps")]
    FuelExhausted { fuel: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Accept,
    Reject,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decision::Accept => write!(f, "accept"),
            Decision::Reject => write!(f, "reject"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult<Q, S> {
    pub decision: Decision,
    pub config: Configuration<Q, S>,
    pub steps: u64,
    pub max_head: usize,
}

/// Builds the start configuration: embedded input at the left, blanks after,
/// head at square zero.
pub fn start_configuration<Q: StateId, I: Copy, S: TapeSym>(
    m: &MachineDef<Q, I, S>,
    input: &[I],
) -> Configuration<Q, S> {
    let len = (m.tape_size)(input.len());
    let mut tape = vec![m.blank; len];
    for (i, &sym) in input.iter().enumerate() {
        tape[i] = (m.input_embed)(sym);
    }
    Configuration {
        state: m.start,
        tape,
        head: 0,
        steps: 0,
    }
}

/// One step of the machine. Reading at `head == tape length` is an error, not
/// blank-extension: the preallocated tape bound is part of what is verified.
pub fn step<Q: StateId, I, S: TapeSym>(
    m: &MachineDef<Q, I, S>,
    mut c: Configuration<Q, S>,
) -> Result<StepOutcome<Q, S>, RunError> {
    if m.is_halting(c.state) {
        return Ok(StepOutcome::Halted(c));
    }
    let Some(&symbol) = c.tape.get(c.head) else {
        return Err(RunError::TapeOverrun {
            state: c.state.name(),
            head: c.head,
            step: c.steps,
        });
    };
    let Some(action) = m.lookup(c.state, symbol) else {
        return Ok(StepOutcome::DeadTransition {
            state: c.state,
            symbol,
            head: c.head,
        });
    };
    c.tape[c.head] = action.write;
    match action.dir {
        Dir::Right => c.head += 1,
        // At the start of the tape a left move stays put.
        Dir::Left => c.head = c.head.saturating_sub(1),
    }
    c.state = action.next;
    c.steps += 1;
    Ok(StepOutcome::Continue(c))
}

/// Default step budget: generously above both built-in machines' step counts,
/// which are at most quadratic in the input length.
pub fn default_fuel(input_len: usize) -> u64 {
    100 * (input_len as u64 + 2).pow(2)
}

/// Runs the machine to a halting configuration or a `RunError`. The observer
/// sees every configuration exactly once, pre-step, including the final one;
/// it is the hook through which the ghost harness attaches.
pub fn run_with<Q: StateId, I: Copy, S: TapeSym, F>(
    m: &MachineDef<Q, I, S>,
    input: &[I],
    fuel: u64,
    mut observer: F,
) -> Result<RunResult<Q, S>, RunError>
where
    F: FnMut(&Configuration<Q, S>),
{
    let mut c = start_configuration(m, input);
    let mut max_head = 0;
    loop {
        observer(&c);
        max_head = max_head.max(c.head);
        if m.is_halting(c.state) {
            let decision = if c.state == m.accept {
                Decision::Accept
            } else {
                Decision::Reject
            };
            let steps = c.steps;
            return Ok(RunResult {
                decision,
                config: c,
                steps,
                max_head,
            });
        }
        if c.steps >= fuel {
            return Err(RunError::FuelExhausted { fuel });
        }
        let at_step = c.steps;
        match step(m, c)? {
            StepOutcome::Continue(next) => c = next,
            StepOutcome::Halted(_) => unreachable!("halting states are handled above"),
            StepOutcome::DeadTransition {
                state,
                symbol,
                head,
            } => {
                return Err(RunError::DeadTransition {
                    state: state.name(),
                    symbol: symbol.render(),
                    head,
                    step: at_step,
                })
            }
        }
    }
}

pub fn run<Q: StateId, I: Copy, S: TapeSym>(
    m: &MachineDef<Q, I, S>,
    input: &[I],
    fuel: u64,
) -> Result<RunResult<Q, S>, RunError> {
    run_with(m, input, fuel, |_| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::{
        parentheses_machine, parse_paren_word, sipser_m2_machine, zeros, M2State, M2Tape,
        ParenState, ParenTape,
    };

    #[test]
    fn start_configuration_paren() {
        let m = parentheses_machine();
        let c = start_configuration(&m, &parse_paren_word("((").unwrap());
        assert_eq!(c.state, ParenState::Q0);
        assert_eq!(c.head, 0);
        assert_eq!(c.steps, 0);
        assert_eq!(
            c.tape,
            vec![
                ParenTape::L,
                ParenTape::L,
                ParenTape::B,
                ParenTape::B,
                ParenTape::B,
            ]
        );
    }

    #[test]
    fn start_configuration_m2() {
        let m = sipser_m2_machine();
        let empty = start_configuration(&m, &zeros(0));
        assert_eq!(empty.tape, vec![M2Tape::B]);
        assert_eq!(empty.head, 0);

        let three = start_configuration(&m, &zeros(3));
        assert_eq!(
            three.tape,
            vec![M2Tape::Z, M2Tape::Z, M2Tape::Z, M2Tape::B]
        );
    }

    #[test]
    fn first_step_of_paren_run() {
        let m = parentheses_machine();
        let c = start_configuration(&m, &parse_paren_word("((").unwrap());
        match step(&m, c).unwrap() {
            StepOutcome::Continue(next) => {
                assert_eq!(next.state, ParenState::Q1);
                assert_eq!(next.head, 1);
                assert_eq!(next.tape[0], ParenTape::X);
                assert_eq!(next.steps, 1);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn left_move_at_tape_start_stays_put() {
        let m = parentheses_machine();
        // q2 reading a left parenthesis moves left; at head 0 it stays put.
        let c = Configuration {
            state: ParenState::Q2,
            tape: vec![ParenTape::L, ParenTape::X, ParenTape::S],
            head: 0,
            steps: 7,
        };
        match step(&m, c).unwrap() {
            StepOutcome::Continue(next) => {
                assert_eq!(next.head, 0);
                assert_eq!(next.state, ParenState::Q2);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn dead_transition_is_reported_not_rejected() {
        let m = parentheses_machine();
        let c = Configuration {
            state: ParenState::Q0,
            tape: vec![ParenTape::X, ParenTape::B, ParenTape::B],
            head: 0,
            steps: 0,
        };
        match step(&m, c).unwrap() {
            StepOutcome::DeadTransition {
                state,
                symbol,
                head,
            } => {
                assert_eq!(state, ParenState::Q0);
                assert_eq!(symbol, ParenTape::X);
                assert_eq!(head, 0);
            }
            other => panic!("expected dead transition, got {other:?}"),
        }
    }

    #[test]
    fn overrun_when_non_halting_head_leaves_tape() {
        let m = sipser_m2_machine();
        let c = Configuration {
            state: M2State::Q1,
            tape: vec![M2Tape::B],
            head: 1,
            steps: 3,
        };
        assert!(matches!(step(&m, c), Err(RunError::TapeOverrun { .. })));
    }

    #[test]
    fn run_accepts_balanced_word_and_restores_tape() {
        let m = parentheses_machine();
        let word = parse_paren_word("(())()").unwrap();
        let r = run(&m, &word, default_fuel(6)).unwrap();
        assert_eq!(r.decision, Decision::Accept);
        assert_eq!(r.config.head, 7);
        let mut expected = vec![ParenTape::B; 13];
        for (i, &s) in word.iter().enumerate() {
            expected[i] = (m.input_embed)(s);
        }
        assert_eq!(r.config.tape, expected);
    }

    #[test]
    fn run_accepts_empty_word_in_one_step() {
        let m = parentheses_machine();
        let r = run(&m, &[], default_fuel(0)).unwrap();
        assert_eq!(r.decision, Decision::Accept);
        assert_eq!(r.steps, 1);
        assert_eq!(r.config.head, 1);
    }

    #[test]
    fn run_rejects_single_right_paren_via_q4() {
        let m = parentheses_machine();
        let word = parse_paren_word(")").unwrap();
        let r = run(&m, &word, default_fuel(1)).unwrap();
        assert_eq!(r.decision, Decision::Reject);
        assert_eq!(r.config.head, 1);
        assert_eq!(
            r.config.tape,
            vec![ParenTape::X, ParenTape::B, ParenTape::B]
        );
    }

    #[test]
    fn m2_accepts_powers_of_two() {
        let m = sipser_m2_machine();
        for (n, expected) in [
            (0, Decision::Reject),
            (1, Decision::Accept),
            (2, Decision::Accept),
            (3, Decision::Reject),
            (4, Decision::Accept),
        ] {
            let r = run(&m, &zeros(n), default_fuel(n)).unwrap();
            assert_eq!(r.decision, expected, "n = {n}");
            assert_eq!(r.config.head, n + 1, "n = {n}");
        }
    }

    #[test]
    fn fuel_exhaustion_is_reported() {
        let m = parentheses_machine();
        let word = parse_paren_word("(())()").unwrap();
        assert_eq!(
            run(&m, &word, 3),
            Err(RunError::FuelExhausted { fuel: 3 })
        );
    }

    #[test]
    fn observer_sees_every_configuration_once() {
        let m = parentheses_machine();
        let word = parse_paren_word("()").unwrap();
        let mut seen = Vec::new();
        let r = run_with(&m, &word, default_fuel(2), |c| seen.push(c.steps)).unwrap();
        let expected: Vec<u64> = (0..=r.steps).collect();
        assert_eq!(seen, expected);
    }

    #[test]
    fn runs_are_deterministic() {
        let m = parentheses_machine();
        let word = parse_paren_word("(()())").unwrap();
        let mut first = Vec::new();
        run_with(&m, &word, default_fuel(6), |c| first.push(c.clone())).unwrap();
        let mut second = Vec::new();
        run_with(&m, &word, default_fuel(6), |c| second.push(c.clone())).unwrap();
        assert_eq!(first, second);
    }

    /// Each step changes at most the pre-step head square, moves the head by
    /// at most one, and changes nothing else.
    fn assert_frame_property<Q: StateId, S: TapeSym>(trace: &[Configuration<Q, S>]) {
        for pair in trace.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            assert_eq!(a.tape.len(), b.tape.len());
            for i in 0..a.tape.len() {
                if i != a.head {
                    assert_eq!(a.tape[i], b.tape[i], "square {i} changed away from head");
                }
            }
            let moved = a.head.abs_diff(b.head);
            assert!(moved <= 1, "head jumped by {moved}");
            assert_eq!(b.steps, a.steps + 1);
        }
    }

    #[test]
    fn frame_property_holds_on_sample_runs() {
        let m = parentheses_machine();
        for word in ["", "()", ")(", "((", "(())()", "())()"] {
            let input = parse_paren_word(word).unwrap();
            let mut trace = Vec::new();
            run_with(&m, &input, default_fuel(input.len()), |c| {
                trace.push(c.clone())
            })
            .unwrap();
            assert_frame_property(&trace);
        }
        let m2 = sipser_m2_machine();
        for n in 0..=9 {
            let mut trace = Vec::new();
            run_with(&m2, &zeros(n), default_fuel(n), |c| trace.push(c.clone())).unwrap();
            assert_frame_property(&trace);
        }
    }
}
