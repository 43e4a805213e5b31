//! Labeled machine combinators over a zipper tape.
//!
//! A machine here is a tree: four primitives (read, write, move, nop) and
//! five composition forms (sequence, switch, while, return, relabel). Each
//! machine yields a *label* when it finishes; switch dispatches on its body's
//! label, while repeats its body until the body yields a present label. The
//! number of internal control states a flattened machine would need is
//! computed compositionally by [`Machine::state_count`] without ever
//! flattening.

use std::collections::VecDeque;
use std::marker::PhantomData;

use thiserror::Error;

pub mod m2;

/// Head directions; `N` stays put.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    L,
    R,
    N,
}

/// A two-way tape as a list zipper. Reading yields a symbol only in
/// `Mid`; in the overflow positions (`LeftOf`, `RightOf`) and on the empty
/// tape there is nothing under the head. Context lists are nearest-first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZipperTape<S> {
    Nil,
    /// Head strictly left of the used tape; fields: nearest used symbol,
    /// remaining symbols to its right.
    LeftOf(S, VecDeque<S>),
    /// Head strictly right of the used tape; fields: nearest used symbol,
    /// remaining symbols to its left.
    RightOf(S, VecDeque<S>),
    /// Head on a used square; fields: left context, current, right context.
    Mid(VecDeque<S>, S, VecDeque<S>),
}

impl<S: Copy> ZipperTape<S> {
    /// Builds a mid-tape from nearest-first context slices.
    pub fn mid(left: &[S], current: S, right: &[S]) -> Self {
        ZipperTape::Mid(left.iter().copied().collect(), current, right.iter().copied().collect())
    }

    pub fn read_current(&self) -> Option<S> {
        match self {
            ZipperTape::Mid(_, current, _) => Some(*current),
            _ => None,
        }
    }

    /// Moves the head; no symbol is ever lost. Moving outward from an
    /// overflow position or the empty tape does nothing.
    pub fn move_head(self, dir: Dir) -> Self {
        use ZipperTape::*;
        match dir {
            Dir::N => self,
            Dir::R => match self {
                Nil => Nil,
                RightOf(prev, left) => RightOf(prev, left),
                LeftOf(next, right) => Mid(VecDeque::new(), next, right),
                Mid(mut left, current, mut right) => match right.pop_front() {
                    Some(next) => {
                        left.push_front(current);
                        Mid(left, next, right)
                    }
                    None => RightOf(current, left),
                },
            },
            Dir::L => match self {
                Nil => Nil,
                LeftOf(next, right) => LeftOf(next, right),
                RightOf(prev, left) => Mid(left, prev, VecDeque::new()),
                Mid(mut left, current, mut right) => match left.pop_front() {
                    Some(prev) => {
                        right.push_front(current);
                        Mid(left, prev, right)
                    }
                    None => LeftOf(current, right),
                },
            },
        }
    }

    /// Writes under the head. In overflow positions this extends the used
    /// tape by one square; none of the built machines exercise those cases,
    /// which [`ExecBudget::overflow_writes`] makes checkable.
    pub fn write(self, symbol: S) -> Self {
        use ZipperTape::*;
        match self {
            Mid(left, _, right) => Mid(left, symbol, right),
            LeftOf(next, mut right) => {
                right.push_front(next);
                Mid(VecDeque::new(), symbol, right)
            }
            RightOf(prev, mut left) => {
                left.push_front(prev);
                Mid(left, symbol, VecDeque::new())
            }
            Nil => Mid(VecDeque::new(), symbol, VecDeque::new()),
        }
    }

    /// Every stored symbol, leftmost first; for the conservation checks.
    pub fn symbols(&self) -> Vec<S> {
        use ZipperTape::*;
        match self {
            Nil => Vec::new(),
            LeftOf(next, right) => {
                let mut out = vec![*next];
                out.extend(right.iter().copied());
                out
            }
            RightOf(prev, left) => {
                let mut out: Vec<S> = left.iter().rev().copied().collect();
                out.push(*prev);
                out
            }
            Mid(left, current, right) => {
                let mut out: Vec<S> = left.iter().rev().copied().collect();
                out.push(*current);
                out.extend(right.iter().copied());
                out
            }
        }
    }
}

/// Label types a switch can dispatch on; `all()` enumerates them so branch
/// maps can be checked for totality and summed for state counts.
pub trait FiniteLabel: Copy + Eq + Send + Sync + 'static {
    fn all() -> Vec<Self>;
}

impl FiniteLabel for () {
    fn all() -> Vec<Self> {
        vec![()]
    }
}

impl<T: FiniteLabel> FiniteLabel for Option<T> {
    fn all() -> Vec<Self> {
        let mut out = vec![None];
        out.extend(T::all().into_iter().map(Some));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("fuel exhausted during combinator execution")]
pub struct FuelExhausted;

/// Step budget and counters shared across one execution tree.
#[derive(Debug, Clone, Copy)]
pub struct ExecBudget {
    pub fuel: u64,
    /// Writes that landed on an overflow position and extended the tape.
    pub overflow_writes: u64,
}

impl ExecBudget {
    pub fn new(fuel: u64) -> Self {
        ExecBudget {
            fuel,
            overflow_writes: 0,
        }
    }

    fn spend(&mut self) -> Result<(), FuelExhausted> {
        if self.fuel == 0 {
            return Err(FuelExhausted);
        }
        self.fuel -= 1;
        Ok(())
    }
}

/// A labeled machine over tape alphabet `S`, yielding a `Label` when done.
pub trait Machine<S: Copy>: Send + Sync {
    type Label;

    /// Internal control states of the flattened machine: read is |Γ|+2,
    /// write and move are 2, nop is 1; sequence and switch add their parts;
    /// while, return and relabel are free.
    fn state_count(&self) -> usize;

    fn exec(
        &self,
        tape: ZipperTape<S>,
        budget: &mut ExecBudget,
    ) -> Result<(Self::Label, ZipperTape<S>), FuelExhausted>;
}

/// Boxed machine, the form everything composes in.
pub type M<S, L> = Box<dyn Machine<S, Label = L>>;

struct ReadM<S>(PhantomData<S>);

impl<S: FiniteLabel> Machine<S> for ReadM<S> {
    type Label = Option<S>;

    fn state_count(&self) -> usize {
        S::all().len() + 2
    }

    fn exec(
        &self,
        tape: ZipperTape<S>,
        budget: &mut ExecBudget,
    ) -> Result<(Self::Label, ZipperTape<S>), FuelExhausted> {
        budget.spend()?;
        Ok((tape.read_current(), tape))
    }
}

struct WriteM<S>(S);

impl<S: Copy + Send + Sync + 'static> Machine<S> for WriteM<S> {
    type Label = ();

    fn state_count(&self) -> usize {
        2
    }

    fn exec(
        &self,
        tape: ZipperTape<S>,
        budget: &mut ExecBudget,
    ) -> Result<(Self::Label, ZipperTape<S>), FuelExhausted> {
        budget.spend()?;
        if !matches!(tape, ZipperTape::Mid(..)) {
            budget.overflow_writes += 1;
        }
        Ok(((), tape.write(self.0)))
    }
}

struct MoveM(Dir);

impl<S: Copy + Send + Sync + 'static> Machine<S> for MoveM {
    type Label = ();

    fn state_count(&self) -> usize {
        2
    }

    fn exec(
        &self,
        tape: ZipperTape<S>,
        budget: &mut ExecBudget,
    ) -> Result<(Self::Label, ZipperTape<S>), FuelExhausted> {
        budget.spend()?;
        Ok(((), tape.move_head(self.0)))
    }
}

struct NopM;

impl<S: Copy + Send + Sync + 'static> Machine<S> for NopM {
    type Label = ();

    fn state_count(&self) -> usize {
        1
    }

    fn exec(
        &self,
        tape: ZipperTape<S>,
        budget: &mut ExecBudget,
    ) -> Result<(Self::Label, ZipperTape<S>), FuelExhausted> {
        budget.spend()?;
        Ok(((), tape))
    }
}

struct SeqM<S, LA, LB> {
    first: M<S, LA>,
    second: M<S, LB>,
}

impl<S: Copy, LA, LB> Machine<S> for SeqM<S, LA, LB> {
    type Label = LB;

    fn state_count(&self) -> usize {
        self.first.state_count() + self.second.state_count()
    }

    fn exec(
        &self,
        tape: ZipperTape<S>,
        budget: &mut ExecBudget,
    ) -> Result<(Self::Label, ZipperTape<S>), FuelExhausted> {
        let (_, tape) = self.first.exec(tape, budget)?;
        self.second.exec(tape, budget)
    }
}

struct SwitchM<S, LB, L> {
    body: M<S, LB>,
    branches: Vec<(LB, M<S, L>)>,
}

impl<S: Copy, LB: FiniteLabel, L> Machine<S> for SwitchM<S, LB, L> {
    type Label = L;

    fn state_count(&self) -> usize {
        self.body.state_count()
            + self
                .branches
                .iter()
                .map(|(_, m)| m.state_count())
                .sum::<usize>()
    }

    fn exec(
        &self,
        tape: ZipperTape<S>,
        budget: &mut ExecBudget,
    ) -> Result<(Self::Label, ZipperTape<S>), FuelExhausted> {
        let (label, tape) = self.body.exec(tape, budget)?;
        let branch = self
            .branches
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, m)| m)
            .expect("switch branch map is total by construction");
        branch.exec(tape, budget)
    }
}

struct WhileM<S, L> {
    body: M<S, Option<L>>,
}

impl<S: Copy, L> Machine<S> for WhileM<S, L> {
    type Label = L;

    fn state_count(&self) -> usize {
        self.body.state_count()
    }

    fn exec(
        &self,
        mut tape: ZipperTape<S>,
        budget: &mut ExecBudget,
    ) -> Result<(Self::Label, ZipperTape<S>), FuelExhausted> {
        loop {
            let (label, next) = self.body.exec(tape, budget)?;
            tape = next;
            if let Some(exit) = label {
                return Ok((exit, tape));
            }
        }
    }
}

struct ReturnM<S, LB, L> {
    label: L,
    body: M<S, LB>,
}

impl<S: Copy, LB, L: Copy + Send + Sync> Machine<S> for ReturnM<S, LB, L> {
    type Label = L;

    fn state_count(&self) -> usize {
        self.body.state_count()
    }

    fn exec(
        &self,
        tape: ZipperTape<S>,
        budget: &mut ExecBudget,
    ) -> Result<(Self::Label, ZipperTape<S>), FuelExhausted> {
        let (_, tape) = self.body.exec(tape, budget)?;
        Ok((self.label, tape))
    }
}

struct RelabelM<S, LB, L> {
    body: M<S, LB>,
    map: fn(LB) -> L,
}

impl<S: Copy, LB, L> Machine<S> for RelabelM<S, LB, L> {
    type Label = L;

    fn state_count(&self) -> usize {
        self.body.state_count()
    }

    fn exec(
        &self,
        tape: ZipperTape<S>,
        budget: &mut ExecBudget,
    ) -> Result<(Self::Label, ZipperTape<S>), FuelExhausted> {
        let (label, tape) = self.body.exec(tape, budget)?;
        Ok(((self.map)(label), tape))
    }
}

/// Reads the symbol under the head; the label is the optional symbol.
pub fn read<S: FiniteLabel>() -> M<S, Option<S>> {
    Box::new(ReadM(PhantomData))
}

pub fn write<S: Copy + Send + Sync + 'static>(symbol: S) -> M<S, ()> {
    Box::new(WriteM(symbol))
}

pub fn move_head<S: Copy + Send + Sync + 'static>(dir: Dir) -> M<S, ()> {
    Box::new(MoveM(dir))
}

pub fn nop<S: Copy + Send + Sync + 'static>() -> M<S, ()> {
    Box::new(NopM)
}

pub fn seq<S, LA, LB>(first: M<S, LA>, second: M<S, LB>) -> M<S, LB>
where
    S: Copy + 'static,
    LA: 'static,
    LB: 'static,
{
    Box::new(SeqM { first, second })
}

/// Dispatch on the body's label. The branch list must cover the body's
/// label type exactly; anything else is a construction bug and panics here.
pub fn switch<S, LB, L>(body: M<S, LB>, branches: Vec<(LB, M<S, L>)>) -> M<S, L>
where
    S: Copy + 'static,
    LB: FiniteLabel,
    L: 'static,
{
    let mut labels = LB::all();
    for (label, _) in &branches {
        let slot = labels
            .iter()
            .position(|l| l == label)
            .expect("duplicate or foreign label in switch branches");
        labels.remove(slot);
    }
    assert!(labels.is_empty(), "switch branches do not cover the label type");
    Box::new(SwitchM { body, branches })
}

/// Repeat the body until it yields a present label.
pub fn while_loop<S, L>(body: M<S, Option<L>>) -> M<S, L>
where
    S: Copy + 'static,
    L: 'static,
{
    Box::new(WhileM { body })
}

/// Run the body, discard its label, yield `label` instead. The label type is
/// whatever the surrounding combinator expects, plain or optional.
pub fn ret<S, LB, L>(label: L, body: M<S, LB>) -> M<S, L>
where
    S: Copy + 'static,
    LB: 'static,
    L: Copy + Send + Sync + 'static,
{
    Box::new(ReturnM { label, body })
}

/// Rename the body's labels individually.
pub fn relabel<S, LB, L>(body: M<S, LB>, map: fn(LB) -> L) -> M<S, L>
where
    S: Copy + 'static,
    LB: 'static,
    L: 'static,
{
    Box::new(RelabelM { body, map })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    impl FiniteLabel for bool {
        fn all() -> Vec<Self> {
            vec![false, true]
        }
    }

    type T = ZipperTape<bool>;

    #[test]
    fn read_is_present_exactly_on_mid() {
        assert_eq!(T::mid(&[], true, &[false, false]).read_current(), Some(true));
        assert_eq!(
            ZipperTape::LeftOf(true, VecDeque::from([false])).read_current(),
            None
        );
        assert_eq!(T::Nil.read_current(), None);
    }

    #[test]
    fn moves_match_the_zipper_laws() {
        let t = T::mid(&[], true, &[false]);
        let left = t.clone().move_head(Dir::L);
        assert_eq!(left, ZipperTape::LeftOf(true, VecDeque::from([false])));
        assert_eq!(left.move_head(Dir::R), t);
        assert_eq!(t.clone().move_head(Dir::N), t);
    }

    #[test]
    fn writes_extend_overflow_positions() {
        let t = ZipperTape::LeftOf(false, VecDeque::from([true]));
        assert_eq!(t.write(true), T::mid(&[], true, &[false, true]));
        assert_eq!(T::Nil.write(false), T::mid(&[], false, &[]));
        let t = T::mid(&[false], false, &[false]).write(true);
        assert_eq!(t.read_current(), Some(true));
    }

    #[test]
    fn exec_of_primitives() {
        let mut budget = ExecBudget::new(10);
        let (label, tape) = read::<bool>()
            .exec(T::mid(&[], true, &[]), &mut budget)
            .unwrap();
        assert_eq!(label, Some(true));
        let ((), tape) = write(false).exec(tape, &mut budget).unwrap();
        assert_eq!(tape.read_current(), Some(false));
        assert_eq!(budget.fuel, 8);
        assert_eq!(budget.overflow_writes, 0);
    }

    #[test]
    fn fuel_runs_out() {
        let never: M<bool, ()> = while_loop(relabel(move_head(Dir::N), |()| None));
        let mut budget = ExecBudget::new(100);
        assert_eq!(never.exec(T::Nil, &mut budget), Err(FuelExhausted));
    }

    #[test]
    #[should_panic(expected = "do not cover")]
    fn partial_switch_is_rejected_at_construction() {
        let _ = switch::<bool, bool, ()>(
            relabel(nop(), |()| true),
            vec![(true, nop())],
        );
    }

    fn arb_tape() -> impl Strategy<Value = T> {
        let syms = proptest::collection::vec(any::<bool>(), 0..6);
        (syms, any::<proptest::sample::Index>()).prop_map(|(syms, idx)| {
            if syms.is_empty() {
                return T::Nil;
            }
            let at = idx.index(syms.len());
            let left: VecDeque<bool> = syms[..at].iter().rev().copied().collect();
            let right: VecDeque<bool> = syms[at + 1..].iter().copied().collect();
            ZipperTape::Mid(left, syms[at], right)
        })
    }

    proptest! {
        #[test]
        fn moves_conserve_symbols(t in arb_tape(), dirs in proptest::collection::vec(0..3usize, 0..12)) {
            let symbols = t.symbols();
            let mut tape = t;
            for d in dirs {
                tape = tape.move_head([Dir::L, Dir::R, Dir::N][d]);
                prop_assert_eq!(tape.symbols(), symbols.clone());
            }
        }

        #[test]
        fn left_then_right_preserves_reads(t in arb_tape()) {
            if let Some(symbol) = t.read_current() {
                let back = t.move_head(Dir::L).move_head(Dir::R);
                prop_assert_eq!(back.read_current(), Some(symbol));
            }
        }

        #[test]
        fn write_then_read_coheres(t in arb_tape(), symbol in any::<bool>()) {
            prop_assert_eq!(t.write(symbol).read_current(), Some(symbol));
        }
    }
}
