//! Digit sequences over `{0, …, M}`.
//!
//! A [`DigitSequence`] is a finite prefix followed by a tail that is either
//! constant (`j^∞`), periodic (`(block)^∞`), or truncated (digits unknown past
//! the prefix). Exact sequences are kept in a canonical form (primitive
//! period, shortest prefix) so that structural equality is sequence equality.

use std::fmt::Write as _;

use num_integer::Integer;
use thiserror::Error;

use crate::numerics::Ordering3;

pub type Digit = u8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequenceError {
    #[error("periodic block must be nonempty")]
    EmptyBlock,
    #[error("digit {digit} exceeds the alphabet maximum {max}")]
    DigitOutOfRange { digit: usize, max: usize },
    #[error("finiteness of a truncated sequence is undecidable")]
    TruncatedTail,
    #[error("cannot parse digit sequence {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Tail {
    Constant(Digit),
    Periodic(Vec<Digit>),
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitSequence {
    prefix: Vec<Digit>,
    tail: Tail,
}

impl DigitSequence {
    pub fn new(prefix: Vec<Digit>, tail: Tail) -> Result<Self, SequenceError> {
        let mut seq = DigitSequence { prefix, tail };
        seq.normalize()?;
        Ok(seq)
    }

    /// `j^∞`
    pub fn constant(j: Digit) -> Self {
        DigitSequence {
            prefix: Vec::new(),
            tail: Tail::Constant(j),
        }
    }

    /// `prefix · j^∞`
    pub fn with_constant_tail(prefix: Vec<Digit>, j: Digit) -> Self {
        DigitSequence::new(prefix, Tail::Constant(j)).expect("constant tails need no block")
    }

    /// `prefix · (block)^∞`; panics on an empty block.
    pub fn periodic(prefix: Vec<Digit>, block: Vec<Digit>) -> Self {
        DigitSequence::new(prefix, Tail::Periodic(block)).expect("periodic block must be nonempty")
    }

    /// Known digits only.
    pub fn truncated(digits: Vec<Digit>) -> Self {
        DigitSequence {
            prefix: digits,
            tail: Tail::Truncated,
        }
    }

    fn normalize(&mut self) -> Result<(), SequenceError> {
        if let Tail::Periodic(block) = &mut self.tail {
            if block.is_empty() {
                return Err(SequenceError::EmptyBlock);
            }
            let p = primitive_period(block);
            block.truncate(p);
            if block.len() == 1 {
                self.tail = Tail::Constant(block[0]);
            }
        }
        match &mut self.tail {
            Tail::Constant(j) => {
                while self.prefix.last() == Some(j) {
                    self.prefix.pop();
                }
            }
            Tail::Periodic(block) => {
                while !self.prefix.is_empty() && self.prefix.last() == block.last() {
                    self.prefix.pop();
                    block.rotate_right(1);
                }
            }
            Tail::Truncated => {}
        }
        Ok(())
    }

    pub fn prefix(&self) -> &[Digit] {
        &self.prefix
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.tail, Tail::Truncated)
    }

    /// Number of known digits of a truncated sequence; `None` for exact ones.
    pub fn known_len(&self) -> Option<usize> {
        match self.tail {
            Tail::Truncated => Some(self.prefix.len()),
            _ => None,
        }
    }

    /// `(preperiod, period)` of an exact sequence.
    pub fn preperiod_and_period(&self) -> Option<(usize, usize)> {
        match &self.tail {
            Tail::Constant(_) => Some((self.prefix.len(), 1)),
            Tail::Periodic(block) => Some((self.prefix.len(), block.len())),
            Tail::Truncated => None,
        }
    }

    /// Digit at 0-based position `i`, or `None` past the end of a truncated sequence.
    pub fn digit(&self, i: usize) -> Option<Digit> {
        if let Some(&d) = self.prefix.get(i) {
            return Some(d);
        }
        let k = i - self.prefix.len();
        match &self.tail {
            Tail::Constant(j) => Some(*j),
            Tail::Periodic(block) => Some(block[k % block.len()]),
            Tail::Truncated => None,
        }
    }

    /// Up to `n` leading digits (fewer only for a short truncated sequence).
    pub fn take(&self, n: usize) -> Vec<Digit> {
        (0..n).map_while(|i| self.digit(i)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = Digit> + '_ {
        (0..).map_while(move |i| self.digit(i))
    }

    /// The sequence with its first `n` digits removed.
    pub fn shift(&self, n: usize) -> DigitSequence {
        if n <= self.prefix.len() {
            let mut out = DigitSequence {
                prefix: self.prefix[n..].to_vec(),
                tail: self.tail.clone(),
            };
            // dropping digits never breaks canonical form
            out.normalize().expect("already valid");
            return out;
        }
        let k = n - self.prefix.len();
        match &self.tail {
            Tail::Constant(j) => DigitSequence::constant(*j),
            Tail::Periodic(block) => {
                let mut b = block.clone();
                b.rotate_left(k % block.len());
                DigitSequence::periodic(Vec::new(), b)
            }
            Tail::Truncated => DigitSequence::truncated(Vec::new()),
        }
    }

    /// `digits · self`
    pub fn prepend(&self, digits: &[Digit]) -> DigitSequence {
        let mut prefix = digits.to_vec();
        prefix.extend_from_slice(&self.prefix);
        DigitSequence::new(prefix, self.tail.clone()).expect("tail already valid")
    }

    pub fn max_digit(&self) -> Option<Digit> {
        let tail_max = match &self.tail {
            Tail::Constant(j) => Some(*j),
            Tail::Periodic(block) => block.iter().copied().max(),
            Tail::Truncated => None,
        };
        self.prefix.iter().copied().max().max(tail_max)
    }

    pub fn check_alphabet(&self, max: Digit) -> Result<(), SequenceError> {
        match self.max_digit() {
            Some(d) if d > max => Err(SequenceError::DigitOutOfRange {
                digit: d as usize,
                max: max as usize,
            }),
            _ => Ok(()),
        }
    }

    /// Has a last nonzero digit (so `0^∞` is not finite).
    pub fn is_finite(&self) -> Result<bool, SequenceError> {
        match &self.tail {
            Tail::Constant(j) => Ok(*j == 0 && !self.prefix.is_empty()),
            Tail::Periodic(_) => Ok(false),
            Tail::Truncated => Err(SequenceError::TruncatedTail),
        }
    }

    /// Has a last digit below `max` (so `M^∞` is not co-finite).
    pub fn is_co_finite(&self, max: Digit) -> Result<bool, SequenceError> {
        match &self.tail {
            Tail::Constant(j) => Ok(*j == max && !self.prefix.is_empty()),
            Tail::Periodic(_) => Ok(false),
            Tail::Truncated => Err(SequenceError::TruncatedTail),
        }
    }

    pub fn is_infinite(&self) -> Result<bool, SequenceError> {
        self.is_finite().map(|f| !f)
    }

    pub fn is_co_infinite(&self, max: Digit) -> Result<bool, SequenceError> {
        self.is_co_finite(max).map(|f| !f)
    }

    /// Digit-wise `M − j`.
    pub fn reflect(&self, max: Digit) -> DigitSequence {
        let flip = |d: &Digit| max - d;
        let tail = match &self.tail {
            Tail::Constant(j) => Tail::Constant(max - j),
            Tail::Periodic(block) => Tail::Periodic(block.iter().map(flip).collect()),
            Tail::Truncated => Tail::Truncated,
        };
        DigitSequence {
            prefix: self.prefix.iter().map(flip).collect(),
            tail,
        }
    }

    /// Text form: `110(10)^inf`, `0^inf`, `1101…`; comma-separated when `max > 9`.
    pub fn render(&self, max: Digit) -> String {
        let sep = if max > 9 { "," } else { "" };
        let mut items: Vec<String> = self.prefix.iter().map(|d| d.to_string()).collect();
        match &self.tail {
            Tail::Constant(j) => items.push(format!("{j}^inf")),
            Tail::Periodic(block) => {
                let inner: Vec<String> = block.iter().map(|d| d.to_string()).collect();
                items.push(format!("({})^inf", inner.join(sep)));
            }
            Tail::Truncated => {}
        }
        let mut out = items.join(sep);
        if matches!(self.tail, Tail::Truncated) {
            out.push('…');
        }
        out
    }

    /// Inverse of [`render`](Self::render); also accepts `...`, `^∞` and
    /// whitespace between single-character digits.
    pub fn parse(text: &str, max: Digit) -> Result<Self, SequenceError> {
        let err = |reason: &str| SequenceError::Parse {
            input: text.to_string(),
            reason: reason.to_string(),
        };
        let mut body = text.trim().replace("^∞", "^inf");
        let truncated = if let Some(stripped) = body.strip_suffix('…').or_else(|| body.strip_suffix("...")) {
            body = stripped.to_string();
            true
        } else {
            false
        };
        let comma_mode = max > 9 || body.contains(',');
        let (head, tail_text) = match body.find('(') {
            Some(open) => {
                let close = body.find(')').ok_or_else(|| err("missing ')'"))?;
                if close < open || &body[close + 1..] != "^inf" {
                    return Err(err("a periodic block must be the last item, written (block)^inf"));
                }
                (body[..open].to_string(), Some(body[open + 1..close].to_string()))
            }
            None => (body.clone(), None),
        };
        if truncated && (tail_text.is_some() || head.contains("^inf")) {
            return Err(err("a truncated sequence cannot have an infinite tail"));
        }
        let split_digits = |s: &str| -> Result<Vec<Digit>, SequenceError> {
            let s = s.trim().trim_end_matches(',');
            if s.is_empty() {
                return Ok(Vec::new());
            }
            let parts: Vec<String> = if comma_mode {
                s.split(',').map(|p| p.trim().to_string()).collect()
            } else {
                s.chars().filter(|c| !c.is_whitespace()).map(String::from).collect()
            };
            parts
                .iter()
                .map(|p| p.parse::<Digit>().map_err(|_| err(&format!("bad digit {p:?}"))))
                .collect()
        };
        let seq = if let Some(block) = tail_text {
            DigitSequence::new(split_digits(&head)?, Tail::Periodic(split_digits(&block)?))?
        } else if let Some(stripped) = head.strip_suffix("^inf") {
            let mut digits = split_digits(stripped)?;
            let j = digits.pop().ok_or_else(|| err("'^inf' needs a digit"))?;
            DigitSequence::with_constant_tail(digits, j)
        } else if truncated {
            DigitSequence::truncated(split_digits(&head)?)
        } else {
            return Err(err("missing tail: end with j^inf, (block)^inf or …"));
        };
        seq.check_alphabet(max)?;
        Ok(seq)
    }
}

fn primitive_period(block: &[Digit]) -> usize {
    let n = block.len();
    (1..=n)
        .find(|&p| n.is_multiple_of(p) && (p..n).all(|i| block[i] == block[i - p]))
        .unwrap_or(n)
}

/// Lexicographic comparison; see [`lex_compare_at`].
pub fn lex_compare(a: &DigitSequence, b: &DigitSequence, depth: usize) -> Ordering3 {
    lex_compare_at(a, b, depth).0
}

/// Lexicographic comparison together with the 1-based index of the first
/// differing digit when there is one.
///
/// Two exact sequences are always decided (they agree forever once they
/// agree over `max(preperiods) + lcm(periods)` digits). When either side is
/// truncated only the first `depth` known digits are inspected, and a tie
/// there is `Unknown`.
pub fn lex_compare_at(a: &DigitSequence, b: &DigitSequence, depth: usize) -> (Ordering3, Option<usize>) {
    let limit = match (a.preperiod_and_period(), b.preperiod_and_period()) {
        (Some((pa, ra)), Some((pb, rb))) => pa.max(pb) + ra.lcm(&rb),
        _ => {
            let mut limit = depth;
            for s in [a, b] {
                if let Some(len) = s.known_len() {
                    limit = limit.min(len);
                }
            }
            limit
        }
    };
    for i in 0..limit {
        let (x, y) = (a.digit(i).expect("within limit"), b.digit(i).expect("within limit"));
        if x != y {
            return (x.cmp(&y).into(), Some(i + 1));
        }
    }
    if a.is_exact() && b.is_exact() {
        (Ordering3::Equal, None)
    } else {
        (Ordering3::Unknown, None)
    }
}

/// `τ_1 … τ_n` where `τ_i` is the parity of the number of ones in binary `i`.
pub fn thue_morse_truncated(n: usize) -> Vec<Digit> {
    (1..=n).map(thue_morse_digit).collect()
}

/// `τ_i` for any `i ≥ 0` (with `τ_0 = 0`).
pub fn thue_morse_digit(i: usize) -> Digit {
    (i.count_ones() % 2) as Digit
}

/// Quasi-greedy expansion of 1 in the generalized golden-ratio base:
/// `(k(k−1))^∞` for `M = 2k−1`, `k^∞` for `M = 2k`.
pub fn alpha_gr(max: Digit) -> DigitSequence {
    assert!(max >= 1, "alphabet needs at least two digits");
    let k = max / 2 + max % 2;
    if max % 2 == 1 {
        DigitSequence::periodic(Vec::new(), vec![k, k - 1])
    } else {
        DigitSequence::constant(k)
    }
}

/// First `n` digits of the quasi-greedy expansion of 1 in base `q_KL(M)`:
/// `k−1+τ_i` for `M = 2k−1`, `k+τ_i−τ_{i−1}` for `M = 2k`.
pub fn alpha_kl(max: Digit, n: usize) -> DigitSequence {
    assert!(max >= 1, "alphabet needs at least two digits");
    let digits = (1..=n)
        .map(|i| {
            if max % 2 == 1 {
                let k = max.div_ceil(2);
                k - 1 + thue_morse_digit(i)
            } else {
                let k = max / 2;
                k + thue_morse_digit(i) - thue_morse_digit(i - 1)
            }
        })
        .collect();
    DigitSequence::truncated(digits)
}

/// Writes digits without separators when `max ≤ 9`.
pub fn render_word(word: &[Digit], max: Digit) -> String {
    let mut out = String::new();
    for (i, d) in word.iter().enumerate() {
        if max > 9 && i > 0 {
            out.push(',');
        }
        write!(out, "{d}").expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(text: &str) -> DigitSequence {
        DigitSequence::parse(text, 1).unwrap()
    }

    #[test]
    fn lexicographic_examples() {
        assert_eq!(lex_compare(&seq("(10)^inf"), &seq("1^inf"), 10), Ordering3::Less);
        assert_eq!(lex_compare_at(&seq("(10)^inf"), &seq("1^inf"), 10), (Ordering3::Less, Some(2)));
        assert_eq!(lex_compare(&seq("110^inf"), &seq("(10)^inf"), 10), Ordering3::Greater);
        assert_eq!(lex_compare(&seq("0^inf"), &seq("0^inf"), 10), Ordering3::Equal);
    }

    #[test]
    fn equal_sequences_with_different_spelling() {
        let a = DigitSequence::periodic(vec![1, 0], vec![1, 0, 1, 0]);
        let b = DigitSequence::periodic(Vec::new(), vec![1, 0]);
        assert_eq!(a, b);
        assert_eq!(lex_compare(&a, &b, 1), Ordering3::Equal);
        let c = DigitSequence::periodic(vec![0, 1], vec![1]);
        assert_eq!(c, DigitSequence::with_constant_tail(vec![0], 1));
    }

    #[test]
    fn long_periods_are_compared_past_the_depth() {
        // differ only at index 31: exact comparison ignores depth
        let mut block_a = vec![0; 31];
        block_a.push(1);
        let mut block_b = vec![0; 31];
        block_b.push(2);
        let a = DigitSequence::periodic(Vec::new(), block_a);
        let b = DigitSequence::periodic(Vec::new(), block_b);
        assert_eq!(lex_compare_at(&a, &b, 3), (Ordering3::Less, Some(32)));
    }

    #[test]
    fn truncated_comparison_respects_depth() {
        let a = DigitSequence::truncated(vec![1, 1, 0, 1]);
        assert_eq!(lex_compare(&a, &seq("1^inf"), 10), Ordering3::Less);
        assert_eq!(lex_compare(&a, &seq("1^inf"), 2), Ordering3::Unknown);
        assert_eq!(lex_compare(&a, &seq("11^inf"), 10), Ordering3::Less);
        assert_eq!(lex_compare(&a, &a, 10), Ordering3::Unknown);
    }

    #[test]
    fn reflection_examples() {
        assert_eq!(seq("0^inf").reflect(1), seq("1^inf"));
        assert_eq!(seq("(10)^inf").reflect(1), seq("(01)^inf"));
        let t = DigitSequence::truncated(vec![1, 1, 0, 1, 0, 0, 1, 1]);
        assert_eq!(t.reflect(1), DigitSequence::truncated(vec![0, 0, 1, 0, 1, 1, 0, 0]));
    }

    #[test]
    fn finiteness() {
        assert_eq!(seq("110^inf").is_finite(), Ok(true));
        assert_eq!(seq("0^inf").is_finite(), Ok(false));
        assert_eq!(seq("(10)^inf").is_finite(), Ok(false));
        assert_eq!(seq("(10)^inf").is_co_finite(1), Ok(false));
        assert_eq!(seq("1^inf").is_co_finite(1), Ok(false));
        assert_eq!(seq("01^inf").is_co_finite(1), Ok(true));
        assert_eq!(DigitSequence::truncated(vec![1]).is_finite(), Err(SequenceError::TruncatedTail));
    }

    #[test]
    fn thue_morse_prefixes() {
        assert_eq!(thue_morse_truncated(8), vec![1, 1, 0, 1, 0, 0, 1, 1]);
        assert_eq!(thue_morse_truncated(1), vec![1]);
        // independent oracle: parity of set bits by repeated halving
        let oracle: Vec<Digit> = (1..=16usize)
            .map(|mut i| {
                let mut parity = 0;
                while i > 0 {
                    parity ^= (i % 2) as Digit;
                    i /= 2;
                }
                parity
            })
            .collect();
        assert_eq!(thue_morse_truncated(16), oracle);
        assert_eq!(render_word(&oracle, 1), "1101001100101101");
    }

    #[test]
    fn thue_morse_recurrences_hold_exhaustively() {
        let tau = thue_morse_truncated(1 << 12);
        let at = |i: usize| tau[i - 1];
        for i in 1..(1 << 11) {
            assert_eq!(at(2 * i), at(i));
            if 2 * i < tau.len() {
                assert_eq!(at(2 * i + 1), 1 - at(i));
            }
        }
    }

    #[test]
    fn golden_ratio_words() {
        assert_eq!(alpha_gr(1), seq("(10)^inf"));
        assert_eq!(alpha_gr(2), DigitSequence::constant(1));
        assert_eq!(alpha_gr(3), DigitSequence::periodic(Vec::new(), vec![2, 1]));
    }

    #[test]
    fn kl_words() {
        assert_eq!(alpha_kl(1, 8).prefix(), &[1, 1, 0, 1, 0, 0, 1, 1]);
        assert_eq!(alpha_kl(2, 8).prefix(), &[2, 1, 0, 2, 0, 1, 2, 1]);
        assert_eq!(alpha_kl(3, 8).prefix(), &[2, 2, 1, 2, 1, 1, 2, 2]);
        for m in 1..=12u8 {
            assert!(alpha_kl(m, 256).max_digit().unwrap() <= m);
        }
    }

    #[test]
    fn render_and_parse() {
        let s = DigitSequence::periodic(vec![1, 1, 0], vec![1, 0]);
        assert_eq!(s.render(1), "1(10)^inf");
        assert_eq!(DigitSequence::parse("11(01)^inf", 1).unwrap(), s);
        assert_eq!(DigitSequence::parse("1(10)^inf", 1).unwrap(), s);
        assert_eq!(seq("110^inf").render(1), "110^inf");
        assert_eq!(DigitSequence::truncated(vec![1, 1, 0]).render(1), "110…");
        assert_eq!(DigitSequence::parse("1101 0011...", 1).unwrap(), DigitSequence::truncated(vec![1, 1, 0, 1, 0, 0, 1, 1]));
        let wide = DigitSequence::periodic(vec![1, 10], vec![2, 5]);
        assert_eq!(wide.render(12), "1,10,(2,5)^inf");
        assert_eq!(DigitSequence::parse("1,10,(2,5)^inf", 12).unwrap(), wide);
        assert_eq!(DigitSequence::parse("3,11^inf", 12).unwrap(), DigitSequence::with_constant_tail(vec![3], 11));
        assert!(DigitSequence::parse("12^inf", 1).is_err());
        assert!(DigitSequence::parse("101", 1).is_err());
        assert!(DigitSequence::parse("1()^inf", 1).is_err());
    }

    #[test]
    fn shift_and_prepend() {
        let s = seq("110(10)^inf");
        assert_eq!(s.shift(2), seq("(01)^inf"));
        assert_eq!(s.shift(7), seq("(10)^inf"));
        assert_eq!(s.shift(8), seq("(01)^inf"));
        assert_eq!(seq("(01)^inf").prepend(&[1, 1]), seq("1(10)^inf"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn exact_seq() -> impl Strategy<Value = DigitSequence> {
            (
                proptest::collection::vec(0u8..=2, 0..6),
                proptest::collection::vec(0u8..=2, 1..5),
            )
                .prop_map(|(p, b)| DigitSequence::periodic(p, b))
        }

        proptest! {
            #[test]
            fn reflection_is_an_order_reversing_involution(a in exact_seq(), b in exact_seq()) {
                prop_assert_eq!(a.reflect(2).reflect(2), a.clone());
                let direct = lex_compare(&a, &b, 50);
                let reflected = lex_compare(&a.reflect(2), &b.reflect(2), 50);
                prop_assert_eq!(direct, reflected.reverse());
            }

            #[test]
            fn exact_comparison_matches_long_prefix(a in exact_seq(), b in exact_seq()) {
                let direct = lex_compare(&a, &b, 1);
                let long: Ordering3 = a.take(200).cmp(&b.take(200)).into();
                prop_assert_eq!(direct, long);
            }

            #[test]
            fn render_parse_round_trip(a in exact_seq()) {
                prop_assert_eq!(DigitSequence::parse(&a.render(2), 2).unwrap(), a);
            }
        }
    }
}
