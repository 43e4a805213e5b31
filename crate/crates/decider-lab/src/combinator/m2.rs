//! The powers-of-two decider rebuilt from combinators.
//!
//! Nine machines compose into `m_sipser_m2`, a 56-state machine over the
//! two-symbol alphabet {0, x}. Each small machine plays the role of one or
//! more control states of the monolithic decider: `m_even0` is the entry
//! dispatch, `m_odd1` scans for the first surviving zero, `m_even`/`m_odd`
//! alternate parity while crossing off every second zero, and `m_rewind`
//! walks the head back until it falls off the left end of the used tape.
//! There is no leading-blank trick here: the left overflow position itself
//! marks the start of the tape, and the rewind hands control back to the
//! entry dispatch rather than to the scanner.

use super::{
    move_head, nop, read, relabel, ret, seq, switch, while_loop, Dir, ExecBudget, FiniteLabel, M,
    ZipperTape,
};
use crate::machines::zeros;
use crate::oracles::is_power_of_2;
use crate::tm::{self, Decision};

/// Tape alphabet of the reconstruction: zero and the cross symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoSym {
    Zero,
    Cross,
}

impl FiniteLabel for TwoSym {
    fn all() -> Vec<Self> {
        vec![TwoSym::Zero, TwoSym::Cross]
    }
}

macro_rules! label_enum {
    ($name:ident { $($variant:ident),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        pub enum $name {
            $($variant),+
        }

        impl FiniteLabel for $name {
            fn all() -> Vec<Self> {
                vec![$($name::$variant),+]
            }
        }
    };
}

label_enum!(EvenLab { ToOdd, ToRewind });
label_enum!(OddLab { ToEven, ToReject });
label_enum!(EvenOddLab { ToRewind, ToReject });
label_enum!(RewindLab { ToBody });
label_enum!(Odd1Lab { ToEvenOdd, ToAccept });
label_enum!(Even0Lab { ToOdd1, ToReject });
label_enum!(Even0Odd1Lab { ToEvenOdd, ToAccept, ToReject });
label_enum!(BodyLab { ToRewind, ToAccept, ToReject });
label_enum!(M2Lab { Accept, Reject });

/// Even-parity scanner (the q2 role): skip crosses, hand zeroes to the odd
/// scanner, and start the rewind at the right end.
pub fn m_even() -> M<TwoSym, EvenLab> {
    while_loop(switch(
        read(),
        vec![
            (Some(TwoSym::Zero), ret(Some(EvenLab::ToOdd), move_head(Dir::R))),
            (Some(TwoSym::Cross), ret(None, move_head(Dir::R))),
            (None, ret(Some(EvenLab::ToRewind), move_head(Dir::L))),
        ],
    ))
}

/// Odd-parity scanner (the q3 role): cross off the zero it is handed; a
/// right-end overflow here means the zero count was odd.
pub fn m_odd() -> M<TwoSym, OddLab> {
    while_loop(switch(
        read(),
        vec![
            (
                Some(TwoSym::Zero),
                ret(Some(OddLab::ToEven), seq(write_cross(), move_head(Dir::R))),
            ),
            (Some(TwoSym::Cross), ret(None, move_head(Dir::R))),
            (None, ret(Some(OddLab::ToReject), nop())),
        ],
    ))
}

fn write_cross() -> M<TwoSym, ()> {
    super::write(TwoSym::Cross)
}

/// One full halving scan (the q2/q3 pair).
pub fn m_even_odd() -> M<TwoSym, EvenOddLab> {
    while_loop(switch(
        m_even(),
        vec![
            (
                EvenLab::ToOdd,
                relabel(m_odd(), |l| match l {
                    OddLab::ToEven => None,
                    OddLab::ToReject => Some(EvenOddLab::ToReject),
                }),
            ),
            (EvenLab::ToRewind, ret(Some(EvenOddLab::ToRewind), nop())),
        ],
    ))
}

/// Rewind (the q4 role): walk left until the head overflows the left end,
/// then step back onto the first square.
pub fn m_rewind() -> M<TwoSym, RewindLab> {
    while_loop(switch(
        read(),
        vec![
            (Some(TwoSym::Zero), ret(None, move_head(Dir::L))),
            (Some(TwoSym::Cross), ret(None, move_head(Dir::L))),
            (None, ret(Some(RewindLab::ToBody), move_head(Dir::R))),
        ],
    ))
}

/// First-zero scanner (the q1 role): skip crosses; a lone surviving zero
/// followed by overflow means accept.
pub fn m_odd1() -> M<TwoSym, Odd1Lab> {
    while_loop(switch(
        read(),
        vec![
            (
                Some(TwoSym::Zero),
                ret(
                    Some(Odd1Lab::ToEvenOdd),
                    seq(write_cross(), move_head(Dir::R)),
                ),
            ),
            (Some(TwoSym::Cross), ret(None, move_head(Dir::R))),
            (None, ret(Some(Odd1Lab::ToAccept), nop())),
        ],
    ))
}

/// Entry dispatch (the q0 role): an empty tape or a stray cross rejects.
pub fn m_even0() -> M<TwoSym, Even0Lab> {
    switch(
        read(),
        vec![
            (Some(TwoSym::Zero), ret(Even0Lab::ToOdd1, move_head(Dir::R))),
            (Some(TwoSym::Cross), ret(Even0Lab::ToReject, nop())),
            (None, ret(Even0Lab::ToReject, nop())),
        ],
    )
}

/// Entry dispatch plus first-zero scan (q0 and q1).
pub fn m_even0_odd1() -> M<TwoSym, Even0Odd1Lab> {
    switch(
        m_even0(),
        vec![
            (
                Even0Lab::ToOdd1,
                relabel(m_odd1(), |l| match l {
                    Odd1Lab::ToEvenOdd => Even0Odd1Lab::ToEvenOdd,
                    Odd1Lab::ToAccept => Even0Odd1Lab::ToAccept,
                }),
            ),
            (Even0Lab::ToReject, ret(Even0Odd1Lab::ToReject, nop())),
        ],
    )
}

/// Everything except the rewind (q0 through q3).
pub fn m_body() -> M<TwoSym, BodyLab> {
    switch(
        m_even0_odd1(),
        vec![
            (
                Even0Odd1Lab::ToEvenOdd,
                relabel(m_even_odd(), |l| match l {
                    EvenOddLab::ToRewind => BodyLab::ToRewind,
                    EvenOddLab::ToReject => BodyLab::ToReject,
                }),
            ),
            (Even0Odd1Lab::ToAccept, ret(BodyLab::ToAccept, nop())),
            (Even0Odd1Lab::ToReject, ret(BodyLab::ToReject, nop())),
        ],
    )
}

/// The whole decider: run the body, rewind and repeat until it accepts or
/// rejects.
pub fn m_sipser_m2() -> M<TwoSym, M2Lab> {
    while_loop(switch(
        m_body(),
        vec![
            (BodyLab::ToRewind, ret(None, m_rewind())),
            (BodyLab::ToAccept, ret(Some(M2Lab::Accept), nop())),
            (BodyLab::ToReject, ret(Some(M2Lab::Reject), nop())),
        ],
    ))
}

/// All nine machines, built once, with their state counts.
pub struct MachineSet {
    pub m_even: M<TwoSym, EvenLab>,
    pub m_odd: M<TwoSym, OddLab>,
    pub m_even_odd: M<TwoSym, EvenOddLab>,
    pub m_rewind: M<TwoSym, RewindLab>,
    pub m_odd1: M<TwoSym, Odd1Lab>,
    pub m_even0: M<TwoSym, Even0Lab>,
    pub m_even0_odd1: M<TwoSym, Even0Odd1Lab>,
    pub m_body: M<TwoSym, BodyLab>,
    pub m_sipser_m2: M<TwoSym, M2Lab>,
}

/// The expected state counts of the nine machines, in `MachineSet` order.
pub const EXPECTED_STATE_COUNTS: [usize; 9] = [10, 11, 22, 10, 11, 8, 20, 44, 56];

pub const MACHINE_NAMES: [&str; 9] = [
    "MEven",
    "MOdd",
    "MEvenOdd",
    "MRewind",
    "MOdd1",
    "MEven0",
    "MEven0Odd1",
    "MEven0Odd1EvenOdd",
    "MSipserM2",
];

impl MachineSet {
    pub fn build() -> Self {
        MachineSet {
            m_even: m_even(),
            m_odd: m_odd(),
            m_even_odd: m_even_odd(),
            m_rewind: m_rewind(),
            m_odd1: m_odd1(),
            m_even0: m_even0(),
            m_even0_odd1: m_even0_odd1(),
            m_body: m_body(),
            m_sipser_m2: m_sipser_m2(),
        }
    }

    pub fn state_counts(&self) -> [usize; 9] {
        [
            self.m_even.state_count(),
            self.m_odd.state_count(),
            self.m_even_odd.state_count(),
            self.m_rewind.state_count(),
            self.m_odd1.state_count(),
            self.m_even0.state_count(),
            self.m_even0_odd1.state_count(),
            self.m_body.state_count(),
            self.m_sipser_m2.state_count(),
        ]
    }
}

/// Initial tape for the word 0^n: empty tape for n = 0, otherwise the head
/// on the leftmost zero.
pub fn encode_zeros(n: usize) -> ZipperTape<TwoSym> {
    if n == 0 {
        ZipperTape::Nil
    } else {
        ZipperTape::mid(&[], TwoSym::Zero, &vec![TwoSym::Zero; n - 1])
    }
}

/// Runs the composed decider on 0^n and checks three things at once: the
/// label matches the power-of-two predicate, the monolithic machine decides
/// the same way, and no write ever landed on an overflow position. Fuel
/// exhaustion counts as failure.
pub fn realization_check(n: usize, fuel: u64) -> bool {
    let machine = m_sipser_m2();
    let mut budget = ExecBudget::new(fuel);
    let Ok((label, _tape)) = machine.exec(encode_zeros(n), &mut budget) else {
        return false;
    };
    if budget.overflow_writes != 0 {
        return false;
    }
    let expected = is_power_of_2(n as u64);
    let monolithic = match tm::run(&crate::machines::sipser_m2_machine(), &zeros(n), fuel) {
        Ok(r) => r.decision == Decision::Accept,
        Err(_) => return false,
    };
    (label == M2Lab::Accept) == expected && monolithic == expected
}

/// Fuel bound for one composed run; same shape as the monolithic default
/// but scaled for the interpreter's per-primitive accounting.
pub fn combinator_fuel(n: usize) -> u64 {
    tm::default_fuel(n).saturating_mul(8)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_counts_match_the_superscripts() {
        let set = MachineSet::build();
        assert_eq!(set.state_counts(), EXPECTED_STATE_COUNTS);
    }

    #[test]
    fn entry_dispatch_moves_right_on_a_zero() {
        let mut budget = ExecBudget::new(100);
        let (label, tape) = m_even0()
            .exec(encode_zeros(2), &mut budget)
            .unwrap();
        assert_eq!(label, Even0Lab::ToOdd1);
        assert_eq!(tape.read_current(), Some(TwoSym::Zero));
        assert_eq!(
            tape,
            ZipperTape::mid(&[TwoSym::Zero], TwoSym::Zero, &[])
        );
    }

    #[test]
    fn empty_tape_rejects() {
        let mut budget = ExecBudget::new(1000);
        let (label, _) = m_sipser_m2().exec(ZipperTape::Nil, &mut budget).unwrap();
        assert_eq!(label, M2Lab::Reject);
    }

    #[test]
    fn small_realizations() {
        for n in 0..=32 {
            assert!(realization_check(n, combinator_fuel(n)), "n = {n}");
        }
    }

    #[test]
    fn powers_accept_non_powers_reject() {
        for (n, expected) in [(1, M2Lab::Accept), (2, M2Lab::Accept), (3, M2Lab::Reject), (6, M2Lab::Reject), (8, M2Lab::Accept)] {
            let mut budget = ExecBudget::new(combinator_fuel(n));
            let (label, _) = m_sipser_m2().exec(encode_zeros(n), &mut budget).unwrap();
            assert_eq!(label, expected, "n = {n}");
            assert_eq!(budget.overflow_writes, 0);
        }
    }

    #[test]
    fn sabotaged_wiring_fails_the_realization_check() {
        // Swap accept and reject in the final dispatch.
        let broken: M<TwoSym, M2Lab> = while_loop(switch(
            m_body(),
            vec![
                (BodyLab::ToRewind, ret(None, m_rewind())),
                (BodyLab::ToAccept, ret(Some(M2Lab::Reject), nop())),
                (BodyLab::ToReject, ret(Some(M2Lab::Accept), nop())),
            ],
        ));
        let mut budget = ExecBudget::new(combinator_fuel(4));
        let (label, _) = broken.exec(encode_zeros(4), &mut budget).unwrap();
        assert_eq!(label, M2Lab::Reject);
        // And the honest check would have wanted Accept.
        assert!(is_power_of_2(4));
    }

    #[test]
    fn exec_is_deterministic() {
        let machine = m_sipser_m2();
        let mut b1 = ExecBudget::new(combinator_fuel(12));
        let mut b2 = ExecBudget::new(combinator_fuel(12));
        let r1 = machine.exec(encode_zeros(12), &mut b1).unwrap();
        let r2 = machine.exec(encode_zeros(12), &mut b2).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(b1.fuel, b2.fuel);
    }
}
