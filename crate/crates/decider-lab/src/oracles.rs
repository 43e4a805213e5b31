//! Reference deciders and the predicates the checkers are stated in.
//!
//! `oracle_parentheses` and `oracle_sipser_m2` are independent single-pass
//! algorithms the machines are tested against; `cfg_member` is a third route
//! for the parentheses language, a grammar-membership dynamic program that
//! shares nothing with the counting formulation.

use crate::machines::ParenSym;
use crate::tm::Decision;

/// Difference between the number of `(` and `)` among the first `i` symbols.
///
/// ```
/// use decider_lab::machines::parse_paren_word;
/// use decider_lab::oracles::left_minus_right;
/// let w = parse_paren_word("(())()").unwrap();
/// assert_eq!(left_minus_right(&w, 6), 0);
/// ```
pub fn left_minus_right(word: &[ParenSym], i: usize) -> i64 {
    assert!(i <= word.len(), "prefix length {i} out of range");
    word[..i]
        .iter()
        .map(|s| match s {
            ParenSym::LP => 1,
            ParenSym::RP => -1,
        })
        .sum()
}

/// True iff no prefix of the first `i` symbols has more `)` than `(`.
pub fn never_more_right_than_left(word: &[ParenSym], i: usize) -> bool {
    assert!(i <= word.len(), "prefix length {i} out of range");
    (0..=i).all(|j| left_minus_right(word, j) >= 0)
}

/// Single-pass reference decider for the parentheses language: count +1 per
/// `(` and -1 per `)`, stop early when the count goes negative, accept iff
/// the final count is zero.
pub fn oracle_parentheses(word: &[ParenSym]) -> Decision {
    let mut i = 0;
    let mut d: i64 = 0;
    while i < word.len() && d >= 0 {
        match word[i] {
            ParenSym::LP => d += 1,
            ParenSym::RP => d -= 1,
        }
        i += 1;
    }
    if d == 0 {
        Decision::Accept
    } else {
        Decision::Reject
    }
}

/// Membership in the grammar S → (S) | SS | ε, by dynamic programming over
/// all substrings. Cubic in the word length, which is fine at the scale this
/// cross-check runs at.
pub fn cfg_member(word: &[ParenSym]) -> bool {
    let n = word.len();
    // member[len][start]: does word[start .. start+len] derive from S?
    let mut member = vec![vec![false; n + 1]; n + 1];
    member[0] = vec![true; n + 1];
    for len in 1..=n {
        for start in 0..=n - len {
            let end = start + len;
            let wrapped = word[start] == ParenSym::LP
                && word[end - 1] == ParenSym::RP
                && member[len - 2][start + 1];
            let split = (start + 1..end)
                .any(|m| member[m - start][start] && member[end - m][m]);
            member[len][start] = wrapped || split;
        }
    }
    member[n][0]
}

/// `b` to the `k`, aborting on overflow of 64-bit signed arithmetic.
pub fn power(b: i64, k: u32) -> i64 {
    let mut acc: i64 = 1;
    for _ in 0..k {
        acc = acc.checked_mul(b).expect("power overflows i64");
    }
    acc
}

/// Is `n` a power of two? Zero is not; one is; an even number is iff its
/// half is; no other odd number is.
///
/// ```
/// use decider_lab::oracles::is_power_of_2;
/// assert!(!is_power_of_2(0));
/// assert!(is_power_of_2(1));
/// assert!(!is_power_of_2(6));
/// ```
pub fn is_power_of_2(n: u64) -> bool {
    match n {
        0 => false,
        1 => true,
        n if n % 2 == 0 => is_power_of_2(n / 2),
        _ => false,
    }
}

/// Reference decider for the powers-of-two language, taking the word length
/// directly (a unary word is determined by its length): halve while even,
/// accept iff the remaining odd number is one.
pub fn oracle_sipser_m2(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut s = n;
    while s % 2 == 0 {
        s /= 2;
    }
    s == 1
}

/// Outcome of the brute-force lemma suite.
#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub checked_up_to: u64,
    pub counterexample: Option<String>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Brute-force check of the power-of-two facts the halving argument rests on:
/// zero is not a power of two; an even `n` is one iff `n/2` is; an odd `n`
/// is one iff `n == 1`; and the halving definition agrees with a direct
/// search over exponents.
pub fn check_power_lemmas(max_n: u64) -> LemmaReport {
    assert!(max_n >= 2, "lemma suite needs max_n >= 2");
    let report = |msg: String| LemmaReport {
        checked_up_to: max_n,
        counterexample: Some(msg),
    };
    if is_power_of_2(0) {
        return report("zero lemma: isPowerOf2(0) returned true".to_string());
    }
    let exact_powers: Vec<u64> = (0..63).map(|k| power(2, k) as u64).collect();
    for n in 0..=max_n {
        if n % 2 == 0 && n > 0 && is_power_of_2(n) != is_power_of_2(n / 2) {
            return report(format!("even lemma fails at n = {n}"));
        }
        if n % 2 == 1 && is_power_of_2(n) != (n == 1) {
            return report(format!("odd lemma fails at n = {n}"));
        }
        if is_power_of_2(n) != exact_powers.contains(&n) {
            return report(format!("definition vs 2^k search disagree at n = {n}"));
        }
    }
    LemmaReport {
        checked_up_to: max_n,
        counterexample: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::{parse_paren_word, paren_words_up_to};

    fn w(s: &str) -> Vec<ParenSym> {
        parse_paren_word(s).unwrap()
    }

    #[test]
    fn left_minus_right_matches_hand_counts() {
        assert_eq!(left_minus_right(&w("(())()"), 6), 0);
        assert_eq!(left_minus_right(&w("())("), 3), -1);
        assert_eq!(left_minus_right(&w(")("), 0), 0);
    }

    #[test]
    fn never_more_examples() {
        assert!(never_more_right_than_left(&w("(())()"), 6));
        assert!(!never_more_right_than_left(&w(")("), 2));
        assert!(never_more_right_than_left(&w(")("), 0));
    }

    #[test]
    fn oracle_parentheses_examples() {
        assert_eq!(oracle_parentheses(&w("(())()")), Decision::Accept);
        assert_eq!(oracle_parentheses(&w("())()")), Decision::Reject);
        assert_eq!(oracle_parentheses(&w("")), Decision::Accept);
    }

    #[test]
    fn cfg_member_examples() {
        assert!(cfg_member(&w("((()())())")));
        assert!(!cfg_member(&w("(()")));
        assert!(cfg_member(&w("()")));
        assert!(cfg_member(&w("")));
        assert!(!cfg_member(&w(")(")));
    }

    /// The admittedly unproven equivalence between the counting conditions
    /// and the grammar, closed by brute force at small scale.
    #[test]
    fn conditions_equal_grammar_membership_up_to_len_10() {
        for word in paren_words_up_to(10) {
            let by_conditions = never_more_right_than_left(&word, word.len())
                && left_minus_right(&word, word.len()) == 0;
            let by_oracle = oracle_parentheses(&word) == Decision::Accept;
            let by_grammar = cfg_member(&word);
            assert_eq!(by_conditions, by_grammar);
            assert_eq!(by_oracle, by_grammar);
        }
    }

    #[test]
    fn power_examples() {
        assert_eq!(power(2, 0), 1);
        assert_eq!(power(2, 10), 1024);
        assert_eq!(power(2, 16), 65536);
    }

    #[test]
    #[should_panic(expected = "power overflows i64")]
    fn power_aborts_on_overflow() {
        power(2, 64);
    }

    #[test]
    fn is_power_of_2_matches_direct_search_up_to_2_16() {
        let powers: Vec<u64> = (0..=16).map(|k| 1u64 << k).collect();
        for n in 0..=(1u64 << 16) {
            assert_eq!(is_power_of_2(n), powers.contains(&n), "n = {n}");
            assert_eq!(oracle_sipser_m2(n), is_power_of_2(n), "n = {n}");
            // A third route: the bit trick.
            assert_eq!(is_power_of_2(n), n != 0 && n & (n - 1) == 0, "n = {n}");
        }
    }

    #[test]
    fn lemma_suite_passes() {
        assert!(check_power_lemmas(1024).passed());
        assert!(check_power_lemmas(2).passed());
    }

    #[test]
    fn broken_even_lemma_is_caught_by_brute_force() {
        // Replace the even lemma with "isPowerOf2(n) <=> isPowerOf2(n-1)".
        // It happens to survive n = 2 (both 2 and 1 are powers of two); the
        // first even counterexample is n = 4 against n - 1 = 3.
        let broken = |n: u64| is_power_of_2(n) == is_power_of_2(n - 1);
        let first_fail = (2..=16u64).filter(|n| n % 2 == 0).find(|&n| !broken(n));
        assert_eq!(first_fail, Some(4));
    }
}
