//! Command-line front end: run machines, emit traces, execute the
//! verification suites, and report violations with CI-friendly exit codes.
//!
//! Exit codes: 0 accept / all checks passed, 1 reject, 2 bad input,
//! 3 engine error (dead transition, tape overrun, fuel exhausted, or a
//! harness self-check failure), 4 at least one verification violation.

use clap::{Parser, Subcommand, ValueEnum};

use decider_lab::machines::{parse_m2_word, parse_paren_word, M2Sym, ParenSym};
use decider_lab::tm::{default_fuel, Decision, RunError};
use decider_lab::trace::{render_line, Trace, TraceOptions};
use decider_lab::verify::{
    left_paren_stress, run_lemma_suite, verify_combinator, verify_m2, verify_paren, CheckSet,
    ReportedViolation,
};

const EXIT_ACCEPT: i32 = 0;
const EXIT_REJECT: i32 = 1;
const EXIT_BAD_INPUT: i32 = 2;
const EXIT_ENGINE: i32 = 3;
const EXIT_VIOLATION: i32 = 4;

#[derive(Parser)]
#[command(
    name = "decider-lab",
    version,
    about = "Instrumented runs and exhaustive verification for two classic single-tape deciders"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MachineArg {
    /// Balanced-parentheses decider (input over "()" with tape bound 2n+1).
    Paren,
    /// Powers-of-two decider (input over "0" with tape bound n+1).
    M2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run one input to its decision.
    Run {
        machine: MachineArg,
        /// Input word; empty if omitted.
        word: Option<String>,
        /// For m2: input length n, standing for the word 0^n.
        #[arg(long)]
        n: Option<usize>,
        /// Step budget; defaults to 100*(n+2)^2 or $DECIDER_LAB_FUEL.
        #[arg(long)]
        fuel: Option<u64>,
    },
    /// Print every configuration of a run.
    Trace {
        machine: MachineArg,
        word: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Append the ghost variables to each record.
        #[arg(long)]
        ghost: bool,
        /// Append the termination measure to each record.
        #[arg(long)]
        variant: bool,
        #[arg(long)]
        fuel: Option<u64>,
    },
    /// Enumerate all inputs up to a size and check every run exhaustively.
    Verify {
        machine: MachineArg,
        /// Maximum word length (paren) or maximum n (m2).
        #[arg(long)]
        max_len: usize,
        /// Comma-separated subset of invariants,variant,bounds,final,oracle,dead.
        /// Defaults to all. bounds and dead name run-fatal checks that are
        /// always on.
        #[arg(long)]
        checks: Option<String>,
        /// Extra m2 sizes beyond --max-len, comma separated.
        #[arg(long, value_delimiter = ',')]
        sample: Vec<usize>,
        #[arg(long)]
        fuel: Option<u64>,
        /// How many violations to print before summarizing.
        #[arg(long, default_value_t = 20)]
        max_report: usize,
        /// Also run the all-left-parens tape-bound witness up to this n.
        #[arg(long)]
        stress: Option<usize>,
    },
    /// Check the combinator reconstruction against the monolithic decider.
    EquivCombinator {
        #[arg(long)]
        max_n: usize,
        #[arg(long, value_delimiter = ',')]
        sample: Vec<usize>,
        #[arg(long)]
        fuel: Option<u64>,
    },
    /// Brute-force the power-of-two lemmas and the accumulated-invariant
    /// argument.
    Lemmas {
        #[arg(long)]
        max_n: u64,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            machine,
            word,
            n,
            fuel,
        } => cmd_run(machine, word, n, fuel),
        Command::Trace {
            machine,
            word,
            n,
            format,
            ghost,
            variant,
            fuel,
        } => cmd_trace(machine, word, n, format, ghost, variant, fuel),
        Command::Verify {
            machine,
            max_len,
            checks,
            sample,
            fuel,
            max_report,
            stress,
        } => cmd_verify(machine, max_len, checks, &sample, fuel, max_report, stress),
        Command::EquivCombinator { max_n, sample, fuel } => {
            cmd_equiv_combinator(max_n, &sample, fuel)
        }
        Command::Lemmas { max_n } => cmd_lemmas(max_n),
    };
    std::process::exit(code);
}

fn env_fuel() -> Option<u64> {
    std::env::var("DECIDER_LAB_FUEL").ok()?.parse().ok()
}

fn resolve_fuel(flag: Option<u64>, input_len: usize) -> u64 {
    flag.or_else(env_fuel)
        .unwrap_or_else(|| default_fuel(input_len))
}

enum Input {
    Paren(Vec<ParenSym>),
    M2(Vec<M2Sym>),
}

fn parse_input(machine: MachineArg, word: Option<&str>, n: Option<usize>) -> Result<Input, String> {
    match machine {
        MachineArg::Paren => {
            if n.is_some() {
                return Err("--n applies only to m2".to_string());
            }
            let word = word.unwrap_or("");
            parse_paren_word(word)
                .map(Input::Paren)
                .ok_or_else(|| format!("'{word}' is not a word over (, )"))
        }
        MachineArg::M2 => match (word, n) {
            (Some(_), Some(_)) => Err("give either a word or --n, not both".to_string()),
            (None, Some(n)) => Ok(Input::M2(decider_lab::machines::zeros(n))),
            (word, None) => {
                let word = word.unwrap_or("");
                parse_m2_word(word)
                    .map(Input::M2)
                    .ok_or_else(|| format!("'{word}' is not a word over 0"))
            }
        },
    }
}

fn engine_exit(err: &RunError) -> i32 {
    eprintln!("error: {err}");
    EXIT_ENGINE
}

fn cmd_run(machine: MachineArg, word: Option<String>, n: Option<usize>, fuel: Option<u64>) -> i32 {
    let input = match parse_input(machine, word.as_deref(), n) {
        Ok(input) => input,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_BAD_INPUT;
        }
    };
    let outcome = match &input {
        Input::Paren(w) => decider_lab::tm::run(
            &decider_lab::machines::parentheses_machine(),
            w,
            resolve_fuel(fuel, w.len()),
        )
        .map(|r| (r.decision, r.steps, r.max_head, r.config.tape.len(), w.len())),
        Input::M2(w) => decider_lab::tm::run(
            &decider_lab::machines::sipser_m2_machine(),
            w,
            resolve_fuel(fuel, w.len()),
        )
        .map(|r| (r.decision, r.steps, r.max_head, r.config.tape.len(), w.len())),
    };
    match outcome {
        Ok((decision, steps, max_head, tape_len, input_len)) => {
            let bound = match machine {
                MachineArg::Paren => format!("2n+1 = {}", 2 * input_len + 1),
                MachineArg::M2 => format!("n+1 = {}", input_len + 1),
            };
            println!("decision: {decision}");
            println!("steps: {steps}");
            println!("max head: {max_head}");
            println!("tape: {tape_len} squares (bound {bound})");
            if decision == Decision::Accept {
                EXIT_ACCEPT
            } else {
                EXIT_REJECT
            }
        }
        Err(err) => engine_exit(&err),
    }
}

fn cmd_trace(
    machine: MachineArg,
    word: Option<String>,
    n: Option<usize>,
    format: Format,
    ghost: bool,
    variant: bool,
    fuel: Option<u64>,
) -> i32 {
    let input = match parse_input(machine, word.as_deref(), n) {
        Ok(input) => input,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_BAD_INPUT;
        }
    };
    let options = TraceOptions { ghost, variant };
    let traced: Result<Trace, RunError> = match &input {
        Input::Paren(w) => {
            decider_lab::trace::trace_paren(w, resolve_fuel(fuel, w.len()), options)
        }
        Input::M2(w) => decider_lab::trace::trace_m2(w, resolve_fuel(fuel, w.len()), options),
    };
    match traced {
        Ok(trace) => {
            for record in &trace.records {
                match format {
                    Format::Text => println!("{}", render_line(record)),
                    Format::Json => println!(
                        "{}",
                        serde_json::to_string(record).expect("trace records serialize")
                    ),
                }
            }
            if trace.decision == Decision::Accept {
                EXIT_ACCEPT
            } else {
                EXIT_REJECT
            }
        }
        Err(err) => engine_exit(&err),
    }
}

fn print_violations(sample: &[ReportedViolation], total: u64) {
    for v in sample {
        eprintln!(
            "{}",
            serde_json::to_string(v).expect("violations serialize")
        );
    }
    if total as usize > sample.len() {
        eprintln!("... and {} more", total as usize - sample.len());
    }
}

fn suite_exit(audit_failures: u64, violations: u64) -> i32 {
    if audit_failures > 0 {
        EXIT_ENGINE
    } else if violations > 0 {
        EXIT_VIOLATION
    } else {
        EXIT_ACCEPT
    }
}

fn cmd_verify(
    machine: MachineArg,
    max_len: usize,
    checks: Option<String>,
    samples: &[usize],
    fuel: Option<u64>,
    max_report: usize,
    stress: Option<usize>,
) -> i32 {
    let checks = match checks {
        Some(list) => match CheckSet::parse(&list) {
            Ok(c) => c,
            Err(msg) => {
                eprintln!("error: {msg}");
                return EXIT_BAD_INPUT;
            }
        },
        None => CheckSet::default(),
    };
    let fuel = fuel.or_else(env_fuel);
    match machine {
        MachineArg::Paren => {
            if !samples.is_empty() {
                eprintln!("error: --sample applies only to m2");
                return EXIT_BAD_INPUT;
            }
            let report = verify_paren(max_len, fuel, checks, max_report);
            println!("machine: paren");
            println!("words: {} (length <= {})", report.words, report.max_len);
            println!("configs checked: {}", report.configs);
            println!(
                "accepts: {}  rejects via q0: {}  rejects via q4: {}",
                report.accepts, report.rejects_via_q0, report.rejects_via_q4
            );
            println!("decision mismatches: {}", report.decision_mismatches);
            println!("violations: {}", report.log.total);
            println!("max steps: {}", report.max_steps);
            println!("elapsed: {:.2?}", report.elapsed);
            let mut code = suite_exit(
                report.log.audit_failures,
                report.log.total + report.decision_mismatches,
            );
            if let Some(stress_n) = stress {
                match stress_witnesses(stress_n) {
                    Ok(()) => {}
                    Err(exit) => code = exit,
                }
            }
            print_violations(&report.log.sample, report.log.total);
            code
        }
        MachineArg::M2 => {
            let report = verify_m2(max_len, samples, fuel, checks, max_report);
            println!("machine: m2");
            println!(
                "runs: {} (n <= {} plus {} samples)",
                report.runs,
                report.max_n,
                report.samples.len()
            );
            println!("configs checked: {}", report.configs);
            println!("accepts: {}", report.accepts);
            println!("decision mismatches: {}", report.decision_mismatches);
            println!("violations: {}", report.log.total);
            println!(
                "snapshots: {}  write-locality checks: {}  audits: {}",
                report.snapshots, report.write_locality_checks, report.audits
            );
            println!("lemma hooks fired on every run: {}", report.lemma_hooks_fired);
            println!("max steps: {}", report.max_steps);
            println!("elapsed: {:.2?}", report.elapsed);
            print_violations(&report.log.sample, report.log.total);
            let effective = report.log.total
                + report.decision_mismatches
                + u64::from(!report.lemma_hooks_fired);
            suite_exit(report.log.audit_failures, effective)
        }
    }
}

fn stress_witnesses(max_n: usize) -> Result<(), i32> {
    for n in 1..=max_n {
        match left_paren_stress(n) {
            Ok(w) => {
                if w.max_stack_write != Some(2 * n - 1) {
                    eprintln!(
                        "stress: n = {n}: expected last stack write at {} but saw {:?}",
                        2 * n - 1,
                        w.max_stack_write
                    );
                    return Err(EXIT_VIOLATION);
                }
            }
            Err(err) => {
                eprintln!("stress: n = {n}: {err}");
                return Err(EXIT_ENGINE);
            }
        }
    }
    println!("stress: (^n touches index 2n-1 for all n <= {max_n}");
    Ok(())
}

fn cmd_equiv_combinator(max_n: usize, samples: &[usize], fuel: Option<u64>) -> i32 {
    let report = verify_combinator(max_n, samples, fuel.or_else(env_fuel));
    let counts = report
        .state_counts
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    println!("state counts: {counts}");
    println!(
        "realization checks: {} ({} failed)",
        report.checked,
        report.failures.len()
    );
    println!("elapsed: {:.2?}", report.elapsed);
    if !report.counts_match {
        eprintln!("state counts diverge from the expected 10 11 22 10 11 8 20 44 56");
    }
    for n in &report.failures {
        eprintln!("realization check failed at n = {n}");
    }
    if report.clean() {
        EXIT_ACCEPT
    } else {
        EXIT_VIOLATION
    }
}

fn cmd_lemmas(max_n: u64) -> i32 {
    if max_n < 2 {
        eprintln!("error: --max-n must be at least 2");
        return EXIT_BAD_INPUT;
    }
    let report = run_lemma_suite(max_n);
    match &report.power.counterexample {
        None => println!("power lemmas: pass (n <= {})", report.power.checked_up_to),
        Some(cx) => println!("power lemmas: FAIL ({cx})"),
    }
    println!(
        "accumulated invariant: {} words, {} failures",
        report.accumulated_words, report.accumulated_failures
    );
    println!("elapsed: {:.2?}", report.elapsed);
    if report.clean() {
        EXIT_ACCEPT
    } else {
        EXIT_VIOLATION
    }
}
