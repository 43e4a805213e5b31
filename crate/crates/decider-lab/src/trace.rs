//! Trace records and their text rendering.
//!
//! One record per configuration, the final halting one included. The text
//! format puts square brackets around the head square; a head parked on the
//! virtual square one past the end renders as empty brackets after the last
//! square. Blanks render as `_` so diffs stay visible.

use serde::Serialize;

use crate::ghost::m2::{m2_variant, M2Checks, M2RunChecker};
use crate::ghost::paren::{paren_variant, ParenChecks, ParenRunChecker};
use crate::machines::{parentheses_machine, sipser_m2_machine, M2Sym, ParenSym};
use crate::tm::{run_with, RunError, TapeSym};

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct TraceRecord {
    pub step: u64,
    pub state: String,
    pub head: usize,
    pub tape: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ghost: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
}

/// The tape with the head square bracketed, e.g. `x[(]___`.
pub fn render_tape_with_head<S: TapeSym>(tape: &[S], head: usize) -> String {
    let mut out = String::with_capacity(tape.len() + 2);
    for (i, s) in tape.iter().enumerate() {
        if i == head {
            out.push('[');
            out.push(s.render());
            out.push(']');
        } else {
            out.push(s.render());
        }
    }
    if head == tape.len() {
        out.push_str("[]");
    }
    out
}

/// One text line: step right-aligned to four columns, state left-aligned to
/// six, head position, bracketed tape, then any ghost and variant fields.
pub fn render_line(record: &TraceRecord) -> String {
    let mut line = format!(
        "{:>4} {:<6} p={} |{}|",
        record.step, record.state, record.head, record.tape
    );
    if let Some(ghost) = &record.ghost {
        line.push_str("  ");
        line.push_str(ghost);
    }
    if let Some(variant) = &record.variant {
        line.push_str("  v=");
        line.push_str(variant);
    }
    line
}

/// Options for trace collection.
#[derive(Debug, Clone, Copy, Default)]
pub struct TraceOptions {
    pub ghost: bool,
    pub variant: bool,
}

pub struct Trace {
    pub records: Vec<TraceRecord>,
    pub decision: crate::tm::Decision,
}

/// Runs the parentheses machine and collects one record per configuration.
pub fn trace_paren(
    input: &[ParenSym],
    fuel: u64,
    options: TraceOptions,
) -> Result<Trace, RunError> {
    let m = parentheses_machine();
    let mut checker = ParenRunChecker::new(
        input,
        ParenChecks {
            invariants: false,
            variant: false,
            final_post: false,
            accumulated: false,
        },
    );
    let mut records = Vec::new();
    let result = run_with(&m, input, fuel, |c| {
        checker.observe(c);
        let ghost = options.ghost.then(|| {
            let g = &checker.ghost;
            format!(
                "k={} s={} s'={} k'={} lp={} rp={}",
                g.k, g.s, g.s_p, g.k_p, g.lp, g.rp
            )
        });
        let variant = options
            .variant
            .then(|| paren_variant(c, &checker.ghost, input).to_string());
        records.push(TraceRecord {
            step: c.steps,
            state: crate::tm::StateId::name(&c.state).to_string(),
            head: c.head,
            tape: render_tape_with_head(&c.tape, c.head),
            ghost,
            variant,
        });
    })?;
    Ok(Trace {
        records,
        decision: result.decision,
    })
}

/// Runs the powers-of-two machine and collects one record per configuration.
pub fn trace_m2(input: &[M2Sym], fuel: u64, options: TraceOptions) -> Result<Trace, RunError> {
    let m = sipser_m2_machine();
    let n = input.len();
    let mut checker = M2RunChecker::new(
        n,
        M2Checks {
            invariants: false,
            variant: false,
        },
    );
    let mut records = Vec::new();
    let result = run_with(&m, input, fuel, |c| {
        checker.observe(c);
        let ghost = options.ghost.then(|| match checker.ghost.snapshot() {
            Some(snap) => {
                let rendered: String = snap.iter().map(|s| s.render()).collect();
                format!("snap={rendered}")
            }
            None => "snap=-".to_string(),
        });
        let variant = options
            .variant
            .then(|| m2_variant(c, &checker.ghost, n).to_string());
        records.push(TraceRecord {
            step: c.steps,
            state: crate::tm::StateId::name(&c.state).to_string(),
            head: c.head,
            tape: render_tape_with_head(&c.tape, c.head),
            ghost,
            variant,
        });
    })?;
    Ok(Trace {
        records,
        decision: result.decision,
    })
}
