//! Runtime embodiment of the proof-only instrumentation: ghost variables,
//! per-state invariant checking, lexicographic termination monitoring, and
//! halting postconditions for both machines.
//!
//! Checkers collect violations instead of throwing, so one run can report
//! every failed clause. Clause names follow the labels used throughout the
//! invariant catalog (I0…I10, "q2 block", "left-minus-right", "never-more")
//! so reports can be cross-referenced.

use std::fmt;

use serde::Serialize;

pub mod m2;
pub mod paren;

/// One failed clause, reported as data.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Violation {
    pub step: u64,
    pub state: String,
    pub clause: String,
    pub expected: String,
    pub actual: String,
}

impl Violation {
    pub fn new(
        step: u64,
        state: &str,
        clause: impl Into<String>,
        expected: impl Into<String>,
        actual: impl Into<String>,
    ) -> Self {
        Violation {
            step,
            state: state.to_string(),
            clause: clause.into(),
            expected: expected.into(),
            actual: actual.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "step {} state {}: {} (expected {}, got {})",
            self.step, self.state, self.clause, self.expected, self.actual
        )
    }
}

/// One component of a termination measure. `NotApplicable` stands for the
/// don't-care branches of the conditional measure expressions; it may hide
/// any value, so it can never decide a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Applicable(i64),
    NotApplicable,
}

/// A lexicographic termination measure, evaluated at one configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariantTuple(pub Vec<Component>);

impl fmt::Display for VariantTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match c {
                Component::Applicable(v) => write!(f, "{v}")?,
                Component::NotApplicable => write!(f, "NA")?,
            }
        }
        write!(f, ")")
    }
}

/// Lexicographic decrease between consecutive measures.
///
/// Scanning left to right, the first position where both components are
/// applicable and unequal must show a strict decrease onto a non-negative
/// value; positions after the deciding one are irrelevant. A pair where a
/// `NotApplicable` blocks the scan before any decrease fails the check (the
/// conditional guards did not cover the transition), as does a pair with no
/// strict decrease at all.
///
/// ```
/// use decider_lab::ghost::{variant_decreases, Component::*, VariantTuple};
/// let prev = VariantTuple(vec![Applicable(2), Applicable(3), Applicable(0)]);
/// let next = VariantTuple(vec![Applicable(2), Applicable(2), Applicable(4)]);
/// assert!(variant_decreases(&prev, &next));
/// assert!(!variant_decreases(&next, &next));
/// ```
pub fn variant_decreases(prev: &VariantTuple, next: &VariantTuple) -> bool {
    assert_eq!(prev.0.len(), next.0.len(), "variant arity mismatch");
    for (p, n) in prev.0.iter().zip(next.0.iter()) {
        match (p, n) {
            (Component::Applicable(a), Component::Applicable(b)) => {
                if b < a {
                    return *b >= 0;
                }
                if b > a {
                    return false;
                }
            }
            _ => return false,
        }
    }
    false
}

/// Trace-level check of the accumulated-invariant argument: when a counter
/// climbs from zero in unit increments and the pointwise predicate holds at
/// every observed step, the accumulated predicate over all counter values
/// so far holds at every step too.
///
/// The trace records `(counter value, pointwise predicate result)` per
/// configuration. The accumulated predicate at a step is the conjunction of
/// all results recorded up to that step, so the check passes exactly when no
/// recorded result is false.
pub fn accumulated_invariant_check(trace: &[(usize, bool)]) -> bool {
    let mut prev_k: Option<usize> = None;
    for &(k, _) in trace {
        match prev_k {
            None => assert_eq!(k, 0, "counter must start at zero"),
            Some(pk) => assert!(
                k == pk || k == pk + 1,
                "counter must be non-decreasing in unit steps (went {pk} -> {k})"
            ),
        }
        prev_k = Some(k);
    }
    trace.iter().all(|&(_, holds)| holds)
}

#[cfg(test)]
mod tests {
    use super::Component::*;
    use super::*;

    fn t(components: &[Component]) -> VariantTuple {
        VariantTuple(components.to_vec())
    }

    #[test]
    fn decrease_at_second_component() {
        assert!(variant_decreases(
            &t(&[Applicable(2), Applicable(3), Applicable(0)]),
            &t(&[Applicable(2), Applicable(2), Applicable(4)]),
        ));
    }

    #[test]
    fn decrease_decided_before_not_applicable_positions() {
        assert!(variant_decreases(
            &t(&[Applicable(1), NotApplicable, NotApplicable, NotApplicable]),
            &t(&[Applicable(0), Applicable(2), Applicable(1), Applicable(4)]),
        ));
    }

    #[test]
    fn equal_tuples_do_not_decrease() {
        let v = t(&[Applicable(2), Applicable(2), Applicable(4)]);
        assert!(!variant_decreases(&v, &v));
    }

    #[test]
    fn not_applicable_before_any_decrease_fails() {
        assert!(!variant_decreases(
            &t(&[Applicable(1), NotApplicable]),
            &t(&[Applicable(1), Applicable(0)]),
        ));
    }

    #[test]
    fn decrease_below_zero_fails() {
        assert!(!variant_decreases(
            &t(&[Applicable(0)]),
            &t(&[Applicable(-1)]),
        ));
    }

    #[test]
    fn increase_fails_even_with_later_decrease() {
        assert!(!variant_decreases(
            &t(&[Applicable(1), Applicable(5)]),
            &t(&[Applicable(2), Applicable(0)]),
        ));
    }

    #[test]
    fn accumulated_check_on_clean_and_faulty_traces() {
        assert!(accumulated_invariant_check(&[]));
        assert!(accumulated_invariant_check(&[
            (0, true),
            (0, true),
            (1, true),
            (2, true)
        ]));
        // Pointwise failure at the step where the counter reaches 2, while
        // the trace keeps going to 3: the accumulated predicate is broken.
        assert!(!accumulated_invariant_check(&[
            (0, true),
            (1, true),
            (2, false),
            (3, true)
        ]));
    }

    #[test]
    #[should_panic(expected = "counter must start at zero")]
    fn accumulated_check_rejects_bad_start() {
        accumulated_invariant_check(&[(1, true)]);
    }

    #[test]
    #[should_panic(expected = "non-decreasing")]
    fn accumulated_check_rejects_counter_jumps() {
        accumulated_invariant_check(&[(0, true), (2, true)]);
    }

    #[test]
    fn variant_tuple_renders_compactly() {
        assert_eq!(
            t(&[Applicable(1), NotApplicable, NotApplicable, NotApplicable]).to_string(),
            "(1,NA,NA,NA)"
        );
        assert_eq!(
            t(&[Applicable(2), Applicable(3), Applicable(0)]).to_string(),
            "(2,3,0)"
        );
    }
}
