//! An executable laboratory for two classic single-tape deciders: the
//! balanced-parentheses machine and the powers-of-two machine.
//!
//! The lab runs the machines under instrumentation that materializes what a
//! correctness argument would carry silently: ghost variables, per-state and
//! global invariants, lexicographic termination measures, and halting
//! postconditions, all checked at every configuration of every run. Decision
//! correctness is cross-checked against independent single-pass oracles and,
//! for the parentheses language, against grammar membership. A separate
//! combinator layer rebuilds the powers-of-two decider from labeled machine
//! primitives over a zipper tape and checks that the composition behaves
//! like the monolithic machine.
//!
//! Entry points:
//! - [`machines`] has the two machine definitions; [`tm`] runs them.
//! - [`ghost`] is the invariant and termination harness.
//! - [`oracles`] holds the reference deciders and counting predicates.
//! - [`combinator`] is the zipper tape and the labeled-machine algebra.
//! - [`verify`] drives the exhaustive suites the CLI and tests share.

pub mod combinator;
pub mod ghost;
pub mod machines;
pub mod oracles;
pub mod tm;
pub mod trace;
pub mod verify;

pub mod guide;
