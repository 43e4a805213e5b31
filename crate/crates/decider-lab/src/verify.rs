//! The exhaustive verification suites: enumerate inputs, run each with the
//! ghost harness attached, cross-check decisions against the oracles, and
//! aggregate violations. The CLI and the acceptance tests both drive these.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::combinator::m2::{
    combinator_fuel, realization_check, MachineSet, EXPECTED_STATE_COUNTS,
};
use crate::ghost::m2::{M2Checks, M2RunChecker};
use crate::ghost::paren::{FinalRoute, ParenChecks, ParenRunChecker};
use crate::ghost::{accumulated_invariant_check, Violation};
use crate::machines::{
    parentheses_machine, paren_words_up_to, render_paren_word, sipser_m2_machine, zeros, ParenSym,
    ParenTape,
};
use crate::oracles::{
    cfg_member, check_power_lemmas, is_power_of_2, left_minus_right, never_more_right_than_left,
    oracle_parentheses, oracle_sipser_m2, LemmaReport,
};
use crate::tm::{default_fuel, run_with, Decision, RunError};

/// Which checks a verification pass applies. Run-fatal events (dead
/// transitions, tape overruns, fuel exhaustion) are always reported; these
/// flags select the evaluated clause families.
#[derive(Debug, Clone, Copy)]
pub struct CheckSet {
    pub invariants: bool,
    pub variant: bool,
    pub bounds: bool,
    pub final_post: bool,
    pub oracle: bool,
    pub dead: bool,
}

impl Default for CheckSet {
    fn default() -> Self {
        CheckSet {
            invariants: true,
            variant: true,
            bounds: true,
            final_post: true,
            oracle: true,
            dead: true,
        }
    }
}

impl CheckSet {
    /// Parses a comma-separated list such as `invariants,variant,oracle`.
    pub fn parse(list: &str) -> Result<Self, String> {
        let mut set = CheckSet {
            invariants: false,
            variant: false,
            bounds: false,
            final_post: false,
            oracle: false,
            dead: false,
        };
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item {
                "invariants" => set.invariants = true,
                "variant" => set.variant = true,
                "bounds" => set.bounds = true,
                "final" => set.final_post = true,
                "oracle" => set.oracle = true,
                "dead" => set.dead = true,
                other => return Err(format!("unknown check '{other}'")),
            }
        }
        Ok(set)
    }
}

/// A violation together with the input it occurred on.
#[derive(Debug, Clone, Serialize)]
pub struct ReportedViolation {
    pub input: String,
    #[serde(flatten)]
    pub violation: Violation,
}

fn run_error_violation(input: &str, err: &RunError) -> ReportedViolation {
    let (clause, step, state) = match err {
        RunError::DeadTransition { state, step, .. } => ("dead-transition", *step, *state),
        RunError::TapeOverrun { state, step, .. } => ("tape-overrun", *step, *state),
        RunError::FuelExhausted { .. } => ("fuel-exhausted", 0, "-"),
    };
    ReportedViolation {
        input: input.to_string(),
        violation: Violation::new(step, state, clause, "a clean run", err.to_string()),
    }
}

/// Rolling tally shared by the suite reports.
#[derive(Debug, Clone, Default)]
pub struct ViolationLog {
    pub total: u64,
    pub audit_failures: u64,
    pub run_errors: u64,
    pub sample: Vec<ReportedViolation>,
    pub cap: usize,
}

impl ViolationLog {
    fn new(cap: usize) -> Self {
        ViolationLog {
            cap,
            ..ViolationLog::default()
        }
    }

    fn push(&mut self, v: ReportedViolation) {
        self.total += 1;
        if v.violation.clause.starts_with("harness-audit") {
            self.audit_failures += 1;
        }
        if self.sample.len() < self.cap {
            self.sample.push(v);
        }
    }

    fn push_run_error(&mut self, input: &str, err: &RunError) {
        self.run_errors += 1;
        self.push(run_error_violation(input, err));
    }
}

#[derive(Debug, Clone)]
pub struct ParenSuiteReport {
    pub max_len: usize,
    pub words: u64,
    pub configs: u64,
    pub accepts: u64,
    pub rejects_via_q0: u64,
    pub rejects_via_q4: u64,
    pub decision_mismatches: u64,
    pub log: ViolationLog,
    pub max_steps: u64,
    pub elapsed: Duration,
}

impl ParenSuiteReport {
    pub fn clean(&self) -> bool {
        self.log.total == 0 && self.decision_mismatches == 0
    }
}

/// Runs every parenthesis word of length at most `max_len` under the full
/// harness and cross-checks the decision against the single-pass oracle, the
/// counting conditions, and grammar membership.
pub fn verify_paren(
    max_len: usize,
    fuel_override: Option<u64>,
    checks: CheckSet,
    report_cap: usize,
) -> ParenSuiteReport {
    let start = Instant::now();
    let m = parentheses_machine();
    let mut report = ParenSuiteReport {
        max_len,
        words: 0,
        configs: 0,
        accepts: 0,
        rejects_via_q0: 0,
        rejects_via_q4: 0,
        decision_mismatches: 0,
        log: ViolationLog::new(report_cap),
        max_steps: 0,
        elapsed: Duration::ZERO,
    };
    for input in paren_words_up_to(max_len) {
        let rendered = render_paren_word(&input);
        report.words += 1;
        let fuel = fuel_override.unwrap_or_else(|| default_fuel(input.len()));
        let mut checker = ParenRunChecker::new(
            &input,
            ParenChecks {
                invariants: checks.invariants,
                variant: checks.variant,
                final_post: checks.final_post,
                accumulated: false,
            },
        );
        let mut configs = 0u64;
        let outcome = run_with(&m, &input, fuel, |c| {
            configs += 1;
            checker.observe(c);
        });
        report.configs += configs;
        for v in checker.violations.drain(..) {
            report.log.push(ReportedViolation {
                input: rendered.clone(),
                violation: v,
            });
        }
        match outcome {
            Ok(run) => {
                report.max_steps = report.max_steps.max(run.steps);
                match checker.route {
                    Some(FinalRoute::Accept) => report.accepts += 1,
                    Some(FinalRoute::RejectViaQ0) => report.rejects_via_q0 += 1,
                    Some(FinalRoute::RejectViaQ4) => report.rejects_via_q4 += 1,
                    None => {}
                }
                if checks.oracle {
                    let accepted = run.decision == Decision::Accept;
                    let by_oracle = oracle_parentheses(&input) == Decision::Accept;
                    let by_conditions = never_more_right_than_left(&input, input.len())
                        && left_minus_right(&input, input.len()) == 0;
                    let by_grammar = cfg_member(&input);
                    if accepted != by_oracle || accepted != by_conditions || accepted != by_grammar
                    {
                        report.decision_mismatches += 1;
                        report.log.push(ReportedViolation {
                            input: rendered.clone(),
                            violation: Violation::new(
                                run.steps,
                                "-",
                                "oracle equivalence",
                                "machine == oracle == conditions == grammar".to_string(),
                                format!(
                                    "machine {accepted}, oracle {by_oracle}, conditions {by_conditions}, grammar {by_grammar}"
                                ),
                            ),
                        });
                    }
                }
            }
            Err(err) => report.log.push_run_error(&rendered, &err),
        }
    }
    report.elapsed = start.elapsed();
    report
}

#[derive(Debug, Clone)]
pub struct M2SuiteReport {
    pub max_n: usize,
    pub samples: Vec<usize>,
    pub runs: u64,
    pub configs: u64,
    pub accepts: u64,
    pub decision_mismatches: u64,
    pub log: ViolationLog,
    pub max_steps: u64,
    /// Every run with n >= 1 fired the first-snapshot zero-count check, and
    /// every run with n >= 2 fired write-locality checks.
    pub lemma_hooks_fired: bool,
    pub snapshots: u64,
    pub write_locality_checks: u64,
    pub num_zeroes_lemma_checks: u64,
    pub audits: u64,
    pub elapsed: Duration,
}

impl M2SuiteReport {
    pub fn clean(&self) -> bool {
        self.log.total == 0 && self.decision_mismatches == 0 && self.lemma_hooks_fired
    }
}

/// Runs 0^n for every n up to `max_n` plus the extra sampled sizes, under
/// the full harness, cross-checking decisions against the halving oracle and
/// the power-of-two predicate.
pub fn verify_m2(
    max_n: usize,
    samples: &[usize],
    fuel_override: Option<u64>,
    checks: CheckSet,
    report_cap: usize,
) -> M2SuiteReport {
    let start = Instant::now();
    let m = sipser_m2_machine();
    let mut report = M2SuiteReport {
        max_n,
        samples: samples.to_vec(),
        runs: 0,
        configs: 0,
        accepts: 0,
        decision_mismatches: 0,
        log: ViolationLog::new(report_cap),
        max_steps: 0,
        lemma_hooks_fired: true,
        snapshots: 0,
        write_locality_checks: 0,
        num_zeroes_lemma_checks: 0,
        audits: 0,
        elapsed: Duration::ZERO,
    };
    let sizes = (0..=max_n).chain(samples.iter().copied());
    for n in sizes {
        let name = format!("0^{n}");
        report.runs += 1;
        let input = zeros(n);
        let fuel = fuel_override.unwrap_or_else(|| default_fuel(n));
        let mut checker = M2RunChecker::new(
            n,
            M2Checks {
                invariants: checks.invariants,
                variant: checks.variant,
            },
        );
        let mut configs = 0u64;
        let outcome = run_with(&m, &input, fuel, |c| {
            configs += 1;
            checker.observe(c);
        });
        report.configs += configs;
        report.snapshots += checker.stats.snapshots;
        report.write_locality_checks += checker.stats.write_locality_checks;
        report.num_zeroes_lemma_checks += checker.stats.num_zeroes_lemma_checks;
        report.audits += checker.stats.audits;
        if checks.invariants {
            if n >= 1 && checker.stats.only_zeroes_lemma_checks != 1 {
                report.lemma_hooks_fired = false;
            }
            if n >= 2 && checker.stats.write_locality_checks == 0 {
                report.lemma_hooks_fired = false;
            }
        }
        for v in checker.violations.drain(..) {
            report.log.push(ReportedViolation {
                input: name.clone(),
                violation: v,
            });
        }
        match outcome {
            Ok(run) => {
                report.max_steps = report.max_steps.max(run.steps);
                if run.decision == Decision::Accept {
                    report.accepts += 1;
                }
                if checks.oracle {
                    let accepted = run.decision == Decision::Accept;
                    let by_oracle = oracle_sipser_m2(n as u64);
                    let by_predicate = is_power_of_2(n as u64);
                    if accepted != by_oracle || accepted != by_predicate {
                        report.decision_mismatches += 1;
                        report.log.push(ReportedViolation {
                            input: name.clone(),
                            violation: Violation::new(
                                run.steps,
                                "-",
                                "oracle equivalence",
                                "machine == oracle == isPowerOf2".to_string(),
                                format!(
                                    "machine {accepted}, oracle {by_oracle}, predicate {by_predicate}"
                                ),
                            ),
                        });
                    }
                }
            }
            Err(err) => report.log.push_run_error(&name, &err),
        }
    }
    report.elapsed = start.elapsed();
    report
}

#[derive(Debug, Clone)]
pub struct CombinatorReport {
    pub state_counts: [usize; 9],
    pub counts_match: bool,
    pub checked: u64,
    pub failures: Vec<usize>,
    pub elapsed: Duration,
}

impl CombinatorReport {
    pub fn clean(&self) -> bool {
        self.counts_match && self.failures.is_empty()
    }
}

/// Asserts the nine state counts, then runs the realization check (label
/// matches the predicate, and the monolithic machine agrees) for every n up
/// to `max_n` plus the sampled sizes.
pub fn verify_combinator(
    max_n: usize,
    samples: &[usize],
    fuel_override: Option<u64>,
) -> CombinatorReport {
    let start = Instant::now();
    let set = MachineSet::build();
    let state_counts = set.state_counts();
    let mut report = CombinatorReport {
        state_counts,
        counts_match: state_counts == EXPECTED_STATE_COUNTS,
        checked: 0,
        failures: Vec::new(),
        elapsed: Duration::ZERO,
    };
    for n in (0..=max_n).chain(samples.iter().copied()) {
        report.checked += 1;
        let fuel = fuel_override.unwrap_or_else(|| combinator_fuel(n));
        if !realization_check(n, fuel) {
            report.failures.push(n);
        }
    }
    report.elapsed = start.elapsed();
    report
}

#[derive(Debug, Clone)]
pub struct LemmaSuiteReport {
    pub power: LemmaReport,
    pub accumulated_words: u64,
    pub accumulated_failures: u64,
    pub elapsed: Duration,
}

impl LemmaSuiteReport {
    pub fn clean(&self) -> bool {
        self.power.passed() && self.accumulated_failures == 0
    }
}

/// Word length bound for the accumulated-invariant pass.
pub const ACCUMULATED_MAX_LEN: usize = 10;

/// Brute-forces the power-of-two lemmas up to `max_n` and replays the
/// accumulated-invariant argument on the trace of every parenthesis word of
/// length at most [`ACCUMULATED_MAX_LEN`].
pub fn run_lemma_suite(max_n: u64) -> LemmaSuiteReport {
    let start = Instant::now();
    let power = check_power_lemmas(max_n);
    let m = parentheses_machine();
    let mut words = 0;
    let mut failures = 0;
    for input in paren_words_up_to(ACCUMULATED_MAX_LEN) {
        words += 1;
        let mut checker = ParenRunChecker::new(
            &input,
            ParenChecks {
                invariants: false,
                variant: false,
                final_post: false,
                accumulated: true,
            },
        );
        let outcome = run_with(&m, &input, default_fuel(input.len()), |c| checker.observe(c));
        if outcome.is_err() || !accumulated_invariant_check(&checker.accumulated_trace) {
            failures += 1;
        }
    }
    LemmaSuiteReport {
        power,
        accumulated_words: words,
        accumulated_failures: failures,
        elapsed: start.elapsed(),
    }
}

/// Witness record for the tape-bound tightness run on `("^n`.
#[derive(Debug, Clone, Copy)]
pub struct StressWitness {
    pub n: usize,
    /// Highest tape index a stack symbol was written to.
    pub max_stack_write: Option<usize>,
    pub max_head: usize,
    pub decision: Decision,
}

/// Runs the all-left-parentheses word and records how far right the stack
/// grows; with tape size 2n+1 the last stack symbol lands on index 2n-1.
pub fn left_paren_stress(n: usize) -> Result<StressWitness, RunError> {
    let m = parentheses_machine();
    let input = vec![ParenSym::LP; n];
    let mut prev: Option<(usize, ParenTape)> = None;
    let mut max_stack_write = None;
    let run = run_with(&m, &input, default_fuel(n), |c| {
        if let Some((head, read)) = prev.take() {
            let written = c.tape[head];
            if written == ParenTape::S && read != ParenTape::S {
                max_stack_write = Some(max_stack_write.map_or(head, |m: usize| m.max(head)));
            }
        }
        if let Some(read) = c.read() {
            prev = Some((c.head, read));
        }
    })?;
    Ok(StressWitness {
        n,
        max_stack_write,
        max_head: run.max_head,
        decision: run.decision,
    })
}
