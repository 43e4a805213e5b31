//! The two built-in deciders, transcribed edge by edge from their state
//! transition diagrams.
//!
//! Self-loop edges are encoded as "write the symbol just read": overwriting a
//! square with the same symbol is legal, and the core semantics has no
//! no-write shortcut. Pairs without an entry are dead; the parentheses
//! machine has six of them, the powers-of-two machine none (its `(q0, x)`
//! edge is drawn explicitly into the reject state).

use crate::tm::{Action, Dir, MachineDef, StateId, TapeSym};

/// Input alphabet of the parentheses machine: Σ = {(, )}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParenSym {
    LP,
    RP,
}

/// Tape alphabet Γ = {blank, (, ), marking symbol, stack symbol}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParenTape {
    B,
    L,
    R,
    X,
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParenState {
    Q0,
    Q1,
    Q2,
    Q3,
    Q4,
    Q5,
    QAcc,
    QRej,
}

impl StateId for ParenState {
    fn name(&self) -> &'static str {
        match self {
            ParenState::Q0 => "q0",
            ParenState::Q1 => "q1",
            ParenState::Q2 => "q2",
            ParenState::Q3 => "q3",
            ParenState::Q4 => "q4",
            ParenState::Q5 => "q5",
            ParenState::QAcc => "q_acc",
            ParenState::QRej => "q_rej",
        }
    }
}

impl TapeSym for ParenTape {
    fn render(&self) -> char {
        match self {
            ParenTape::B => '_',
            ParenTape::L => '(',
            ParenTape::R => ')',
            ParenTape::X => 'x',
            ParenTape::S => '$',
        }
    }
}

pub fn embed_paren(s: ParenSym) -> ParenTape {
    match s {
        ParenSym::LP => ParenTape::L,
        ParenSym::RP => ParenTape::R,
    }
}

/// Input alphabet of the powers-of-two machine: Σ = {0}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum M2Sym {
    Zero,
}

/// Tape alphabet Γ = {blank, zero, cross symbol}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum M2Tape {
    B,
    Z,
    X,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum M2State {
    Q0,
    Q1,
    Q2,
    Q3,
    Q4,
    QAcc,
    QRej,
}

impl StateId for M2State {
    fn name(&self) -> &'static str {
        match self {
            M2State::Q0 => "q0",
            M2State::Q1 => "q1",
            M2State::Q2 => "q2",
            M2State::Q3 => "q3",
            M2State::Q4 => "q4",
            M2State::QAcc => "q_acc",
            M2State::QRej => "q_rej",
        }
    }
}

impl TapeSym for M2Tape {
    fn render(&self) -> char {
        match self {
            M2Tape::B => '_',
            M2Tape::Z => '0',
            M2Tape::X => 'x',
        }
    }
}

pub fn embed_m2(s: M2Sym) -> M2Tape {
    match s {
        M2Sym::Zero => M2Tape::Z,
    }
}

/// The six dead pairs of the parentheses machine, in state order.
pub const PAREN_DEAD_PAIRS: [(ParenState, ParenTape); 6] = [
    (ParenState::Q0, ParenTape::X),
    (ParenState::Q1, ParenTape::X),
    (ParenState::Q2, ParenTape::B),
    (ParenState::Q3, ParenTape::X),
    (ParenState::Q4, ParenTape::B),
    (ParenState::Q5, ParenTape::B),
];

/// The decider for correctly nested and juxtaposed parentheses.
/// Tape size is `2n + 1`: up to `n` stack symbols after the input, plus one
/// blank so the empty word has a square to read.
pub fn parentheses_machine() -> MachineDef<ParenState, ParenSym, ParenTape> {
    use ParenState::*;
    use ParenTape::*;
    let act = |write, dir, next| Action { write, dir, next };
    let transitions = vec![
        // q0: dispatch on the next unhandled symbol.
        (Q0, L, act(X, Dir::Right, Q1)),
        (Q0, R, act(X, Dir::Right, Q3)),
        (Q0, B, act(B, Dir::Right, QAcc)),
        (Q0, S, act(S, Dir::Right, QRej)),
        // q1: left parenthesis seen, scan right to the first blank.
        (Q1, L, act(L, Dir::Right, Q1)),
        (Q1, R, act(R, Dir::Right, Q1)),
        (Q1, S, act(S, Dir::Right, Q1)),
        (Q1, B, act(S, Dir::Left, Q2)),
        // q2: push done, scan left back to the marking symbol.
        (Q2, L, act(L, Dir::Left, Q2)),
        (Q2, R, act(R, Dir::Left, Q2)),
        (Q2, S, act(S, Dir::Left, Q2)),
        (Q2, X, act(L, Dir::Right, Q0)),
        // q3: right parenthesis seen, scan right past the stack.
        (Q3, L, act(L, Dir::Right, Q3)),
        (Q3, R, act(R, Dir::Right, Q3)),
        (Q3, S, act(S, Dir::Right, Q3)),
        (Q3, B, act(B, Dir::Left, Q4)),
        // q4: pop if a stack symbol is there, otherwise reject.
        (Q4, L, act(L, Dir::Right, QRej)),
        (Q4, R, act(R, Dir::Right, QRej)),
        (Q4, X, act(X, Dir::Right, QRej)),
        (Q4, S, act(B, Dir::Left, Q5)),
        // q5: pop done, scan left back to the marking symbol.
        (Q5, L, act(L, Dir::Left, Q5)),
        (Q5, R, act(R, Dir::Left, Q5)),
        (Q5, S, act(S, Dir::Left, Q5)),
        (Q5, X, act(R, Dir::Right, Q0)),
    ];
    MachineDef::new(
        "paren",
        vec![Q0, Q1, Q2, Q3, Q4, Q5, QAcc, QRej],
        Q0,
        QAcc,
        QRej,
        B,
        transitions,
        |n| 2 * n + 1,
        embed_paren,
    )
    .expect("parentheses machine definition is well-formed")
}

/// The decider for {0^n | n a power of two}. Tape size is `n + 1`: the input
/// plus the single blank that ends every left-to-right scan.
pub fn sipser_m2_machine() -> MachineDef<M2State, M2Sym, M2Tape> {
    use M2State::*;
    use M2Tape::*;
    let act = |write, dir, next| Action { write, dir, next };
    let transitions = vec![
        // q0: blank out the first zero so the rewind can find square zero.
        (Q0, Z, act(B, Dir::Right, Q1)),
        (Q0, B, act(B, Dir::Right, QRej)),
        (Q0, X, act(X, Dir::Right, QRej)),
        // q1: start of a scan; a lone leading zero means accept.
        (Q1, Z, act(X, Dir::Right, Q2)),
        (Q1, X, act(X, Dir::Right, Q1)),
        (Q1, B, act(B, Dir::Right, QAcc)),
        // q2/q3: cross off every second zero, tracking parity in the state.
        (Q2, Z, act(Z, Dir::Right, Q3)),
        (Q2, X, act(X, Dir::Right, Q2)),
        (Q2, B, act(B, Dir::Left, Q4)),
        (Q3, Z, act(X, Dir::Right, Q2)),
        (Q3, X, act(X, Dir::Right, Q3)),
        (Q3, B, act(B, Dir::Right, QRej)),
        // q4: rewind to the blank at square zero.
        (Q4, Z, act(Z, Dir::Left, Q4)),
        (Q4, X, act(X, Dir::Left, Q4)),
        (Q4, B, act(B, Dir::Right, Q1)),
    ];
    MachineDef::new(
        "m2",
        vec![Q0, Q1, Q2, Q3, Q4, QAcc, QRej],
        Q0,
        QAcc,
        QRej,
        B,
        transitions,
        |n| n + 1,
        embed_m2,
    )
    .expect("powers-of-two machine definition is well-formed")
}

/// Parses a word over {(, )}; `None` on any other character.
pub fn parse_paren_word(s: &str) -> Option<Vec<ParenSym>> {
    s.chars()
        .map(|c| match c {
            '(' => Some(ParenSym::LP),
            ')' => Some(ParenSym::RP),
            _ => None,
        })
        .collect()
}

/// Parses a word over {0}; `None` on any other character.
pub fn parse_m2_word(s: &str) -> Option<Vec<M2Sym>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(M2Sym::Zero),
            _ => None,
        })
        .collect()
}

pub fn zeros(n: usize) -> Vec<M2Sym> {
    vec![M2Sym::Zero; n]
}

/// All parenthesis words of length `len`, lexicographic with `(` before `)`.
pub fn paren_words_of_length(len: usize) -> impl Iterator<Item = Vec<ParenSym>> {
    assert!(len < usize::BITS as usize - 1, "word length too large");
    (0..1usize << len).map(move |bits| {
        (0..len)
            .map(|pos| {
                if bits >> (len - 1 - pos) & 1 == 0 {
                    ParenSym::LP
                } else {
                    ParenSym::RP
                }
            })
            .collect()
    })
}

/// All parenthesis words of length at most `max_len`, shortest first.
pub fn paren_words_up_to(max_len: usize) -> impl Iterator<Item = Vec<ParenSym>> {
    (0..=max_len).flat_map(paren_words_of_length)
}

pub fn render_paren_word(word: &[ParenSym]) -> String {
    word.iter().map(|&s| embed_paren(s).render()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tm::{Action, Dir};

    #[test]
    fn paren_table_has_exactly_24_live_entries() {
        let m = parentheses_machine();
        assert_eq!(m.live_transition_count(), 24);
    }

    #[test]
    fn paren_dead_pairs_are_exactly_the_six_listed() {
        use ParenState::*;
        use ParenTape::*;
        let m = parentheses_machine();
        let all_symbols = [B, L, R, X, S];
        let mut dead = Vec::new();
        for q in [Q0, Q1, Q2, Q3, Q4, Q5] {
            for s in all_symbols {
                if m.lookup(q, s).is_none() {
                    dead.push((q, s));
                }
            }
        }
        assert_eq!(dead, PAREN_DEAD_PAIRS.to_vec());
    }

    #[test]
    fn m2_table_has_exactly_15_live_entries_and_no_dead_pairs() {
        use M2State::*;
        use M2Tape::*;
        let m = sipser_m2_machine();
        assert_eq!(m.live_transition_count(), 15);
        for q in [Q0, Q1, Q2, Q3, Q4] {
            for s in [B, Z, X] {
                assert!(m.lookup(q, s).is_some(), "({q:?}, {s:?}) should be live");
            }
        }
    }

    #[test]
    fn paren_sample_edges() {
        use ParenState::*;
        use ParenTape::*;
        let m = parentheses_machine();
        assert_eq!(
            m.lookup(Q1, B),
            Some(Action {
                write: S,
                dir: Dir::Left,
                next: Q2
            })
        );
        assert_eq!(m.lookup(Q0, X), None);
        assert_eq!(
            m.lookup(Q4, S),
            Some(Action {
                write: B,
                dir: Dir::Left,
                next: Q5
            })
        );
    }

    #[test]
    fn m2_sample_edges() {
        use M2State::*;
        use M2Tape::*;
        let m = sipser_m2_machine();
        assert_eq!(
            m.lookup(Q3, Z),
            Some(Action {
                write: X,
                dir: Dir::Right,
                next: Q2
            })
        );
        assert_eq!(
            m.lookup(Q4, B),
            Some(Action {
                write: B,
                dir: Dir::Right,
                next: Q1
            })
        );
        assert_eq!(
            m.lookup(Q1, X),
            Some(Action {
                write: X,
                dir: Dir::Right,
                next: Q1
            })
        );
    }

    #[test]
    fn word_enumeration_is_length_then_lexicographic() {
        let words: Vec<String> = paren_words_up_to(2).map(|w| render_paren_word(&w)).collect();
        assert_eq!(words, vec!["", "(", ")", "((", "()", ")(", "))"]);
        assert_eq!(paren_words_up_to(14).count(), (1 << 15) - 1);
    }

    #[test]
    fn word_parsing_rejects_foreign_characters() {
        assert!(parse_paren_word("(a)").is_none());
        assert!(parse_m2_word("01").is_none());
        assert_eq!(parse_m2_word("000").unwrap().len(), 3);
    }
}
