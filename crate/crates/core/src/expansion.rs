//! Greedy, quasi-greedy, lazy and quasi-lazy expansions, the characteristic
//! sequences `α^j`, `γ^j`, and their lexicographic validators.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::numerics::{ExactKey, Ordering3, Scalar};
use crate::sequences::{lex_compare_at, Digit, DigitSequence, SequenceError};
use crate::system::{RegularSystem, SystemError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExpansionKind {
    Greedy,
    QuasiGreedy,
    Lazy,
    QuasiLazy,
}

impl ExpansionKind {
    pub const ALL: [ExpansionKind; 4] = [
        ExpansionKind::Greedy,
        ExpansionKind::QuasiGreedy,
        ExpansionKind::Lazy,
        ExpansionKind::QuasiLazy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExpansionKind::Greedy => "greedy",
            ExpansionKind::QuasiGreedy => "quasi-greedy",
            ExpansionKind::Lazy => "lazy",
            ExpansionKind::QuasiLazy => "quasi-lazy",
        }
    }

    /// The kind that corresponds under reflection into the dual system.
    pub fn reflected(self) -> ExpansionKind {
        match self {
            ExpansionKind::Greedy => ExpansionKind::Lazy,
            ExpansionKind::QuasiGreedy => ExpansionKind::QuasiLazy,
            ExpansionKind::Lazy => ExpansionKind::Greedy,
            ExpansionKind::QuasiLazy => ExpansionKind::QuasiGreedy,
        }
    }

    /// Greedy-side kinds pick lexicographic maxima.
    pub fn is_greedy_side(self) -> bool {
        matches!(self, ExpansionKind::Greedy | ExpansionKind::QuasiGreedy)
    }
}

impl fmt::Display for ExpansionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExpansionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "greedy" => Ok(ExpansionKind::Greedy),
            "quasi-greedy" | "quasigreedy" => Ok(ExpansionKind::QuasiGreedy),
            "lazy" => Ok(ExpansionKind::Lazy),
            "quasi-lazy" | "quasilazy" => Ok(ExpansionKind::QuasiLazy),
            other => Err(format!(
                "unknown expansion kind {other:?} (expected greedy, quasi-greedy, lazy or quasi-lazy)"
            )),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpansionError {
    #[error("{x} lies outside [{lambda}, {big_lambda}] and has no expansion")]
    OutOfRange { x: String, lambda: String, big_lambda: String },
    #[error("digit {step} cannot be decided at the current precision ({reason})")]
    Undetermined { step: usize, reason: String },
    #[error("characteristic argument for {what} violates its bounds; the system cannot be regular")]
    BoundViolation { what: String },
    #[error("digit index {index} is not allowed here (alphabet maximum {max})")]
    BadDigitIndex { index: usize, max: usize },
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

/// Where the digit stream starts repeating: digits `start..start + period`
/// (0-based) form the repeating block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleInfo {
    pub start: usize,
    pub period: usize,
}

/// A finished run of the digit-selection rule.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionState {
    kind: ExpansionKind,
    start_value: Scalar,
    digits: Vec<Digit>,
    current_value: Scalar,
    cycle: Option<CycleInfo>,
}

impl ExpansionState {
    pub fn kind(&self) -> ExpansionKind {
        self.kind
    }

    /// The expanded point.
    pub fn start_value(&self) -> &Scalar {
        &self.start_value
    }

    /// The emitted digits.
    pub fn digits(&self) -> &[Digit] {
        &self.digits
    }

    /// The emitted digits as a truncated sequence.
    pub fn digits_emitted(&self) -> DigitSequence {
        DigitSequence::truncated(self.digits.clone())
    }

    /// Remainder after the emitted digits; the value of the rest of the expansion.
    pub fn current_value(&self) -> &Scalar {
        &self.current_value
    }

    pub fn cycle_info(&self) -> Option<CycleInfo> {
        self.cycle
    }

    pub fn is_exact(&self) -> bool {
        self.cycle.is_some()
    }

    /// The whole expansion when a cycle was found, the emitted digits otherwise.
    pub fn sequence(&self) -> DigitSequence {
        match self.cycle {
            Some(CycleInfo { start, period }) => DigitSequence::periodic(
                self.digits[..start].to_vec(),
                self.digits[start..start + period].to_vec(),
            ),
            None => self.digits_emitted(),
        }
    }
}

/// Streaming digit selection. Remainders are tracked exactly when the input
/// is exact, and a repeated remainder closes a cycle.
pub struct Expander<'a> {
    system: &'a RegularSystem,
    kind: ExpansionKind,
    start_value: Scalar,
    digits: Vec<Digit>,
    // values[i] is the remainder before digit i
    values: Vec<Scalar>,
    seen: HashMap<ExactKey, usize>,
    cycle: Option<CycleInfo>,
}

impl<'a> Expander<'a> {
    pub fn new(system: &'a RegularSystem, x: Scalar, kind: ExpansionKind) -> Result<Self, ExpansionError> {
        match system.locate(&x) {
            Ordering3::Equal => {}
            Ordering3::Unknown => {
                return Err(ExpansionError::Undetermined {
                    step: 0,
                    reason: format!("cannot tell whether {x} lies in [λ, Λ]"),
                })
            }
            _ => {
                return Err(ExpansionError::OutOfRange {
                    x: x.to_string(),
                    lambda: system.lambda().to_string(),
                    big_lambda: system.big_lambda().to_string(),
                })
            }
        }
        let mut seen = HashMap::new();
        if let Some(key) = x.exact_key() {
            seen.insert(key, 0);
        }
        Ok(Expander {
            system,
            kind,
            start_value: x.clone(),
            digits: Vec::new(),
            values: vec![x],
            seen,
            cycle: None,
        })
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn cycle_info(&self) -> Option<CycleInfo> {
        self.cycle
    }

    fn value_at(&self, i: usize) -> &Scalar {
        match self.cycle {
            Some(CycleInfo { start, period }) if i >= start + period => &self.values[start + (i - start) % period],
            _ => &self.values[i],
        }
    }

    fn undetermined(&self, reason: String) -> ExpansionError {
        ExpansionError::Undetermined {
            step: self.digits.len() + 1,
            reason,
        }
    }

    fn choose(&self, x: &Scalar) -> Result<usize, ExpansionError> {
        let r = self.system;
        let m = r.max_digit() as usize;
        let ask = |o: Option<bool>, j: usize, what: &str| {
            o.ok_or_else(|| self.undetermined(format!("{x} against the {what} threshold of digit {j}")))
        };
        match self.kind {
            ExpansionKind::Greedy => {
                for j in (1..=m).rev() {
                    if ask(r.greedy_threshold(j).compare(x).is_le(), j, "greedy")? {
                        return Ok(j);
                    }
                }
                Ok(0)
            }
            ExpansionKind::QuasiGreedy => {
                if ask(x.compare(r.lambda()).is_eq(), 0, "greedy")? {
                    return Ok(0);
                }
                for j in (1..=m).rev() {
                    if ask(r.greedy_threshold(j).compare(x).is_lt(), j, "greedy")? {
                        return Ok(j);
                    }
                }
                Ok(0)
            }
            ExpansionKind::Lazy => {
                for j in 0..m {
                    if ask(r.lazy_threshold(j).compare(x).is_ge(), j, "lazy")? {
                        return Ok(j);
                    }
                }
                Ok(m)
            }
            ExpansionKind::QuasiLazy => {
                if ask(x.compare(r.big_lambda()).is_eq(), m, "lazy")? {
                    return Ok(m);
                }
                for j in 0..m {
                    if ask(r.lazy_threshold(j).compare(x).is_gt(), j, "lazy")? {
                        return Ok(j);
                    }
                }
                Ok(m)
            }
        }
    }

    pub fn next_digit(&mut self) -> Result<Digit, ExpansionError> {
        let i = self.digits.len();
        if let Some(CycleInfo { start, period }) = self.cycle {
            let d = self.digits[start + (i - start) % period];
            self.digits.push(d);
            return Ok(d);
        }
        let x = self.values[i].clone();
        let j = self.choose(&x)?;
        let next = self.system.system().remainder(j, &x);
        self.digits.push(j as Digit);
        if let Some(key) = next.exact_key() {
            if let Some(&start) = self.seen.get(&key) {
                self.cycle = Some(CycleInfo {
                    start,
                    period: i + 1 - start,
                });
            } else {
                self.seen.insert(key, i + 1);
            }
        }
        if self.cycle.is_none() {
            self.values.push(next);
        }
        Ok(j as Digit)
    }

    /// Emits digits until `n` are available.
    pub fn advance_to(&mut self, n: usize) -> Result<(), ExpansionError> {
        while self.digits.len() < n {
            self.next_digit()?;
        }
        Ok(())
    }

    /// Emits digits until a cycle closes or `max_digits` are available.
    pub fn advance_until_cycle(&mut self, max_digits: usize) -> Result<(), ExpansionError> {
        while self.cycle.is_none() && self.digits.len() < max_digits {
            self.next_digit()?;
        }
        Ok(())
    }

    pub fn state(&self) -> ExpansionState {
        ExpansionState {
            kind: self.kind,
            start_value: self.start_value.clone(),
            digits: self.digits.clone(),
            current_value: self.value_at(self.digits.len()).clone(),
            cycle: self.cycle,
        }
    }
}

/// The first `n` digits of the `kind` expansion of `x ∈ [λ, Λ]`.
pub fn expand(system: &RegularSystem, x: &Scalar, kind: ExpansionKind, n: usize) -> Result<ExpansionState, ExpansionError> {
    let mut e = Expander::new(system, x.clone(), kind)?;
    e.advance_to(n)?;
    Ok(e.state())
}

/// Like [`expand`], but keeps going past `n` digits (up to `max_digits`) in
/// search of a cycle, so that the result is exact whenever possible.
pub fn expand_exact(
    system: &RegularSystem,
    x: &Scalar,
    kind: ExpansionKind,
    max_digits: usize,
) -> Result<ExpansionState, ExpansionError> {
    let mut e = Expander::new(system, x.clone(), kind)?;
    e.advance_until_cycle(max_digits)?;
    Ok(e.state())
}

/// Expansion extended past `[λ, Λ]` by the extremal sub/superexpansions:
/// greedy and quasi-greedy give `M^∞` for `x ≥ Λ`, lazy and quasi-lazy give
/// `0^∞` for `x ≤ λ`. Points without any such expansion are still errors.
pub fn expand_extended(
    system: &RegularSystem,
    x: &Scalar,
    kind: ExpansionKind,
    n: usize,
) -> Result<DigitSequence, ExpansionError> {
    let m = system.max_digit();
    if kind.is_greedy_side() && x.compare(system.big_lambda()).is_ge() == Some(true) {
        return Ok(DigitSequence::constant(m));
    }
    if !kind.is_greedy_side() && x.compare(system.lambda()).is_le() == Some(true) {
        return Ok(DigitSequence::constant(0));
    }
    Ok(expand_exact(system, x, kind, n)?.sequence())
}

/// `q_j((d_{j+1}+λ)/q_{j+1} − d_j/q_j)`, checked to lie in `(λ, Λ]`.
pub fn alpha_argument(system: &RegularSystem, j: usize) -> Result<Scalar, ExpansionError> {
    let m = system.max_digit() as usize;
    if j >= m {
        return Err(ExpansionError::BadDigitIndex { index: j, max: m });
    }
    let arg = system.system().remainder(j, system.greedy_threshold(j + 1));
    check_bounds(&arg, system.lambda(), system.big_lambda(), false, &format!("α^{j}"))?;
    Ok(arg)
}

/// `q_j((d_{j−1}+Λ)/q_{j−1} − d_j/q_j)`, checked to lie in `[λ, Λ)`.
pub fn gamma_argument(system: &RegularSystem, j: usize) -> Result<Scalar, ExpansionError> {
    let m = system.max_digit() as usize;
    if j == 0 || j > m {
        return Err(ExpansionError::BadDigitIndex { index: j, max: m });
    }
    let arg = system.system().remainder(j, system.lazy_threshold(j - 1));
    check_bounds(&arg, system.lambda(), system.big_lambda(), true, &format!("γ^{j}"))?;
    Ok(arg)
}

fn check_bounds(arg: &Scalar, lo: &Scalar, hi: &Scalar, open_above: bool, what: &str) -> Result<(), ExpansionError> {
    let (lower, upper) = if open_above {
        (arg.compare(lo).is_ge(), arg.compare(hi).is_lt())
    } else {
        (arg.compare(lo).is_gt(), arg.compare(hi).is_le())
    };
    match (lower, upper) {
        (Some(true), Some(true)) => Ok(()),
        (Some(false), _) | (_, Some(false)) => Err(ExpansionError::BoundViolation { what: what.to_string() }),
        _ => Err(ExpansionError::Undetermined {
            step: 0,
            reason: format!("bounds of the {what} argument"),
        }),
    }
}

/// `α^j`, the quasi-greedy expansion of its argument (`0 ≤ j < M`).
pub fn alpha_j(system: &RegularSystem, j: usize, n: usize) -> Result<ExpansionState, ExpansionError> {
    expand_exact(system, &alpha_argument(system, j)?, ExpansionKind::QuasiGreedy, n)
}

/// `γ^j`, the quasi-lazy expansion of its argument (`0 < j ≤ M`).
pub fn gamma_j(system: &RegularSystem, j: usize, n: usize) -> Result<ExpansionState, ExpansionError> {
    expand_exact(system, &gamma_argument(system, j)?, ExpansionKind::QuasiLazy, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Valid,
    /// 1-based index `n` of the digit whose tail breaks the condition.
    Invalid(usize),
    Undetermined(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Uniqueness {
    Unique,
    NotUnique(usize),
    Undetermined(usize),
}

impl fmt::Display for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Validity::Valid => f.write_str("Valid"),
            Validity::Invalid(n) => write!(f, "Invalid at position {n}"),
            Validity::Undetermined(d) => write!(f, "Undetermined at depth {d}"),
        }
    }
}

impl fmt::Display for Uniqueness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Uniqueness::Unique => f.write_str("Unique"),
            Uniqueness::NotUnique(n) => write!(f, "NotUnique at position {n}"),
            Uniqueness::Undetermined(d) => write!(f, "Undetermined at depth {d}"),
        }
    }
}

/// The characteristic sequences of a system, computed once to a fixed depth
/// and reused across validations.
#[derive(Debug, Clone)]
pub struct Validator {
    max: Digit,
    depth: usize,
    alphas: Vec<DigitSequence>,
    gammas: Vec<DigitSequence>,
}

impl Validator {
    pub fn new(system: &RegularSystem, depth: usize) -> Result<Self, ExpansionError> {
        let m = system.max_digit() as usize;
        let alphas = (0..m)
            .map(|j| alpha_j(system, j, depth).map(|s| s.sequence()))
            .collect::<Result<_, _>>()?;
        let gammas = (1..=m)
            .map(|j| gamma_j(system, j, depth).map(|s| s.sequence()))
            .collect::<Result<_, _>>()?;
        Ok(Validator {
            max: system.max_digit(),
            depth,
            alphas,
            gammas,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn alpha(&self, j: usize) -> &DigitSequence {
        &self.alphas[j]
    }

    pub fn gamma(&self, j: usize) -> &DigitSequence {
        &self.gammas[j - 1]
    }

    /// Checks the lexicographic characterization of `kind` at every index.
    ///
    /// Exact sequences are checked at every distinct tail; truncated ones at
    /// the indices within the depth. The earliest refuted index wins over any
    /// undecided comparison.
    pub fn validate(&self, seq: &DigitSequence, kind: ExpansionKind) -> Result<Validity, ExpansionError> {
        seq.check_alphabet(self.max)?;
        let positions = match seq.preperiod_and_period() {
            Some((pre, per)) => pre + per,
            None => seq.known_len().unwrap_or(0).min(self.depth),
        };
        let mut undecided = false;
        for n in 1..=positions {
            let j = seq.digit(n - 1).expect("within known digits") as usize;
            let tail = seq.shift(n);
            let verdict = match kind {
                ExpansionKind::Greedy | ExpansionKind::QuasiGreedy if j < self.max as usize => {
                    let c = lex_compare_at(&tail, &self.alphas[j], self.depth).0;
                    if kind == ExpansionKind::Greedy {
                        c.is_lt()
                    } else {
                        c.is_le()
                    }
                }
                ExpansionKind::Lazy | ExpansionKind::QuasiLazy if j > 0 => {
                    let c = lex_compare_at(&tail, &self.gammas[j - 1], self.depth).0;
                    if kind == ExpansionKind::Lazy {
                        c.is_gt()
                    } else {
                        c.is_ge()
                    }
                }
                _ => Some(true),
            };
            match verdict {
                Some(false) => return Ok(Validity::Invalid(n)),
                Some(true) => {}
                None => undecided = true,
            }
        }
        let shape = match kind {
            ExpansionKind::QuasiGreedy => seq.is_infinite().ok(),
            ExpansionKind::QuasiLazy => seq.is_co_infinite(self.max).ok(),
            _ => Some(true),
        };
        match shape {
            Some(false) => Ok(Validity::Invalid(seq.prefix().len())),
            None => Ok(Validity::Undetermined(self.depth)),
            Some(true) if undecided => Ok(Validity::Undetermined(self.depth)),
            Some(true) => Ok(Validity::Valid),
        }
    }

    /// Unique iff greedy and lazy at once.
    pub fn is_unique(&self, seq: &DigitSequence) -> Result<Uniqueness, ExpansionError> {
        let greedy = self.validate(seq, ExpansionKind::Greedy)?;
        let lazy = self.validate(seq, ExpansionKind::Lazy)?;
        Ok(match (greedy, lazy) {
            (Validity::Invalid(a), Validity::Invalid(b)) => Uniqueness::NotUnique(a.min(b)),
            (Validity::Invalid(a), _) | (_, Validity::Invalid(a)) => Uniqueness::NotUnique(a),
            (Validity::Valid, Validity::Valid) => Uniqueness::Unique,
            _ => Uniqueness::Undetermined(self.depth),
        })
    }
}

pub fn validate(
    system: &RegularSystem,
    seq: &DigitSequence,
    kind: ExpansionKind,
    depth: usize,
) -> Result<Validity, ExpansionError> {
    Validator::new(system, depth)?.validate(seq, kind)
}

pub fn is_unique(system: &RegularSystem, seq: &DigitSequence, depth: usize) -> Result<Uniqueness, ExpansionError> {
    Validator::new(system, depth)?.is_unique(seq)
}

/// Compares the greedy and lazy expansions of `x`. Unique only with an exact
/// certificate (both expansions cycle and coincide); agreement through
/// `depth` digits alone is reported as undetermined.
pub fn unique_point_test(system: &RegularSystem, x: &Scalar, depth: usize) -> Result<Uniqueness, ExpansionError> {
    let greedy = expand_exact(system, x, ExpansionKind::Greedy, depth)?;
    let lazy = expand_exact(system, x, ExpansionKind::Lazy, depth)?;
    let (g, l) = (greedy.sequence(), lazy.sequence());
    match lex_compare_at(&g, &l, depth) {
        (Ordering3::Equal, _) => Ok(Uniqueness::Unique),
        (Ordering3::Unknown, _) => Ok(Uniqueness::Undetermined(depth)),
        (_, position) => Ok(Uniqueness::NotUnique(position.expect("decided comparisons report a position"))),
    }
}

/// The quasi-greedy expansion rebuilt from the greedy one: a finite
/// `j_1⋯j_n0^∞` becomes `j_1⋯j_{n−1}(j_n−1)·α^{j_n−1}`; an infinite one is
/// returned unchanged. Truncated results carry at least `n` digits.
pub fn quasi_greedy_from_greedy(
    system: &RegularSystem,
    greedy: &DigitSequence,
    n: usize,
) -> Result<DigitSequence, ExpansionError> {
    if !greedy.is_finite()? {
        return Ok(greedy.clone());
    }
    let mut head = greedy.prefix().to_vec();
    let last = head.pop().expect("a finite sequence has a nonzero digit") as usize;
    head.push((last - 1) as Digit);
    let tail = alpha_j(system, last - 1, n)?.sequence();
    Ok(join(head, tail))
}

/// The quasi-lazy expansion rebuilt from the lazy one: a co-finite
/// `j_1⋯j_nM^∞` becomes `j_1⋯j_{n−1}(j_n+1)·γ^{j_n+1}`.
pub fn quasi_lazy_from_lazy(system: &RegularSystem, lazy: &DigitSequence, n: usize) -> Result<DigitSequence, ExpansionError> {
    let m = system.max_digit();
    if !lazy.is_co_finite(m)? {
        return Ok(lazy.clone());
    }
    let mut head = lazy.prefix().to_vec();
    let last = head.pop().expect("a co-finite sequence has a digit below M") as usize;
    head.push((last + 1) as Digit);
    let tail = gamma_j(system, last + 1, n)?.sequence();
    Ok(join(head, tail))
}

fn join(head: Vec<Digit>, tail: DigitSequence) -> DigitSequence {
    if tail.is_exact() {
        tail.prepend(&head)
    } else {
        let mut digits = head;
        digits.extend_from_slice(tail.prefix());
        DigitSequence::truncated(digits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::AlphabetBaseSystem;

    fn regular(pairs: &[(&str, &str)]) -> RegularSystem {
        RegularSystem::new(AlphabetBaseSystem::parse_pairs(pairs).unwrap()).unwrap()
    }

    fn s(text: &str) -> Scalar {
        text.parse().unwrap()
    }

    fn seq(text: &str) -> DigitSequence {
        DigitSequence::parse(text, 1).unwrap()
    }

    fn binary() -> RegularSystem {
        regular(&[("0", "2"), ("1", "2")])
    }

    fn golden() -> RegularSystem {
        let phi = "(1+sqrt(5))/2";
        regular(&[("0", phi), ("1", phi)])
    }

    #[test]
    fn golden_ratio_expansions_of_one() {
        let g = golden();
        let greedy = expand_exact(&g, &s("1"), ExpansionKind::Greedy, 50).unwrap();
        assert_eq!(greedy.sequence(), seq("110^inf"));
        let quasi = expand_exact(&g, &s("1"), ExpansionKind::QuasiGreedy, 50).unwrap();
        assert_eq!(quasi.sequence(), seq("(10)^inf"));
    }

    #[test]
    fn binary_third_cycles() {
        let state = expand(&binary(), &s("1/3"), ExpansionKind::Greedy, 10).unwrap();
        assert_eq!(state.digits(), &[0, 1, 0, 1, 0, 1, 0, 1, 0, 1]);
        assert_eq!(state.cycle_info(), Some(CycleInfo { start: 0, period: 2 }));
        assert_eq!(state.sequence(), seq("(01)^inf"));
        assert_eq!(state.current_value(), &s("1/3"));
    }

    #[test]
    fn lazy_expansion_of_lambda_is_zero() {
        for r in [binary(), golden(), regular(&[("-1", "9/5"), ("0", "3/2")])] {
            let state = expand_exact(&r, r.lambda(), ExpansionKind::Lazy, 10).unwrap();
            assert_eq!(state.sequence(), DigitSequence::constant(0));
        }
    }

    #[test]
    fn edge_states() {
        let r = regular(&[("0", "3/2"), ("1", "9/5")]);
        let q = expand_exact(&r, r.lambda(), ExpansionKind::QuasiGreedy, 10).unwrap();
        assert_eq!(q.sequence(), DigitSequence::constant(0));
        let q = expand_exact(&r, r.big_lambda(), ExpansionKind::QuasiLazy, 10).unwrap();
        assert_eq!(q.sequence(), DigitSequence::constant(1));
        let out = expand(&r, &s("2"), ExpansionKind::Greedy, 3);
        assert!(matches!(out, Err(ExpansionError::OutOfRange { .. })));
        assert_eq!(
            expand_extended(&r, &s("2"), ExpansionKind::Greedy, 3).unwrap(),
            DigitSequence::constant(1)
        );
        assert_eq!(
            expand_extended(&r, &s("-1"), ExpansionKind::QuasiLazy, 3).unwrap(),
            DigitSequence::constant(0)
        );
        assert!(expand_extended(&r, &s("-1"), ExpansionKind::Greedy, 3).is_err());
    }

    #[test]
    fn interval_inputs_report_the_undecided_step() {
        let r = binary();
        // an enclosure straddling the greedy threshold 1/2
        let x = Scalar::enclosure(
            s("1/2").as_rational().unwrap() - s("1/1000").as_rational().unwrap(),
            s("1/2").as_rational().unwrap() + s("1/1000").as_rational().unwrap(),
            8,
        );
        match expand(&r, &x, ExpansionKind::Greedy, 5) {
            Err(ExpansionError::Undetermined { step, .. }) => assert_eq!(step, 1),
            other => panic!("expected an undetermined first digit, got {other:?}"),
        }
    }

    #[test]
    fn characteristic_arguments() {
        let r = regular(&[("0", "19/10"), ("1", "19/10"), ("2", "19/10")]);
        for j in 0..2 {
            assert_eq!(alpha_argument(&r, j).unwrap(), s("1"));
        }
        // M/(q−1) − 1 = 2/(9/10) − 1 = 11/9
        for j in 1..=2 {
            assert_eq!(gamma_argument(&r, j).unwrap(), s("11/9"));
        }
        let b = binary();
        assert_eq!(alpha_j(&b, 0, 10).unwrap().sequence(), DigitSequence::constant(1));
        assert_eq!(gamma_j(&b, 1, 10).unwrap().sequence(), DigitSequence::constant(0));
        assert!(alpha_argument(&b, 1).is_err());
        assert!(gamma_argument(&b, 0).is_err());
    }

    #[test]
    fn validator_examples() {
        let b = binary();
        assert_eq!(validate(&b, &seq("0^inf"), ExpansionKind::Greedy, 10).unwrap(), Validity::Valid);
        assert_eq!(validate(&b, &seq("01^inf"), ExpansionKind::Greedy, 10).unwrap(), Validity::Invalid(1));
        assert_eq!(
            validate(&b, &seq("10^inf"), ExpansionKind::QuasiGreedy, 10).unwrap(),
            Validity::Invalid(1)
        );
        assert_eq!(validate(&b, &seq("01^inf"), ExpansionKind::QuasiGreedy, 10).unwrap(), Validity::Valid);
        assert_eq!(validate(&golden(), &seq("110^inf"), ExpansionKind::Greedy, 20).unwrap(), Validity::Valid);
        assert_eq!(validate(&golden(), &seq("(10)^inf"), ExpansionKind::Greedy, 20).unwrap(), Validity::Invalid(2));
        assert!(validate(&b, &DigitSequence::constant(2), ExpansionKind::Greedy, 10).is_err());
    }

    #[test]
    fn truncated_words_are_never_certified() {
        let b = binary();
        let w = DigitSequence::truncated(vec![1, 0, 1]);
        assert_eq!(validate(&b, &w, ExpansionKind::Greedy, 10).unwrap(), Validity::Undetermined(10));
        let bad = DigitSequence::truncated(vec![0, 1, 1]);
        // tail 11 after the 0 is not yet below 1^∞
        assert_eq!(validate(&b, &bad, ExpansionKind::Greedy, 10).unwrap(), Validity::Undetermined(10));
        let g = golden();
        let refuted = DigitSequence::truncated(vec![0, 1, 1, 0]);
        assert_eq!(validate(&g, &refuted, ExpansionKind::Greedy, 10).unwrap(), Validity::Invalid(1));
    }

    #[test]
    fn uniqueness_examples() {
        let b = binary();
        assert_eq!(is_unique(&b, &seq("0^inf"), 10).unwrap(), Uniqueness::Unique);
        assert_eq!(is_unique(&b, &seq("(10)^inf"), 10).unwrap(), Uniqueness::Unique);
        assert_eq!(is_unique(&b, &seq("10^inf"), 10).unwrap(), Uniqueness::NotUnique(1));
        assert_eq!(unique_point_test(&b, b.lambda(), 10).unwrap(), Uniqueness::Unique);
        assert_eq!(unique_point_test(&b, &s("1/2"), 10).unwrap(), Uniqueness::NotUnique(1));
        assert_eq!(unique_point_test(&b, &s("2/3"), 10).unwrap(), Uniqueness::Unique);
        let g = golden();
        assert_eq!(unique_point_test(&g, g.big_lambda(), 10).unwrap(), Uniqueness::Unique);
        assert_eq!(unique_point_test(&g, &s("1"), 10).unwrap(), Uniqueness::NotUnique(1));
    }

    #[test]
    fn greedy_to_quasi_greedy_rewrite() {
        let g = golden();
        let greedy = expand_exact(&g, &s("1"), ExpansionKind::Greedy, 50).unwrap().sequence();
        assert_eq!(quasi_greedy_from_greedy(&g, &greedy, 50).unwrap(), seq("(10)^inf"));
        let b = binary();
        let lazy = expand_exact(&b, &s("1/2"), ExpansionKind::Lazy, 50).unwrap().sequence();
        assert_eq!(lazy, seq("01^inf"));
        assert_eq!(quasi_lazy_from_lazy(&b, &lazy, 50).unwrap(), seq("10^inf"));
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in ExpansionKind::ALL {
            assert_eq!(kind.name().parse::<ExpansionKind>().unwrap(), kind);
            assert_eq!(kind.reflected().reflected(), kind);
        }
        assert!("eager".parse::<ExpansionKind>().is_err());
    }

    mod props {
        use super::*;
        use num_bigint::BigInt;
        use num_rational::BigRational;
        use proptest::prelude::*;

        fn ratio(n: i64, d: i64) -> Scalar {
            Scalar::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
        }

        fn pair_system() -> impl Strategy<Value = RegularSystem> {
            (11i64..=20, 11i64..=20, prop_oneof![Just((0i64, 1i64)), Just((-1, 2)), Just((-2, 1))]).prop_map(
                |(a, b, (d0, d1))| {
                    let system = AlphabetBaseSystem::new(
                        vec![Scalar::from_integer(d0), Scalar::from_integer(d1)],
                        vec![ratio(a, 10), ratio(b, 10)],
                    )
                    .unwrap();
                    RegularSystem::new(system).unwrap()
                },
            )
        }

        fn point(r: &RegularSystem, t: i64) -> Scalar {
            r.lambda() + &(ratio(t, 64) * (r.big_lambda() - r.lambda()))
        }

        fn kind() -> impl Strategy<Value = ExpansionKind> {
            prop_oneof![
                Just(ExpansionKind::Greedy),
                Just(ExpansionKind::QuasiGreedy),
                Just(ExpansionKind::Lazy),
                Just(ExpansionKind::QuasiLazy),
            ]
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn exact_expansions_evaluate_back(r in pair_system(), t in 0i64..=64, k in kind()) {
                let x = point(&r, t);
                let state = expand_exact(&r, &x, k, 200).unwrap();
                if state.is_exact() {
                    prop_assert_eq!(r.system().pi_eval(&state.sequence()).unwrap(), x);
                } else {
                    let enclosure = r.system().pi_eval(&state.sequence()).unwrap();
                    let (lo, hi) = enclosure.bounds();
                    let v = x.as_rational().unwrap();
                    prop_assert!(&lo <= v && v <= &hi);
                }
            }

            #[test]
            fn expansions_are_strictly_increasing(r in pair_system(), a in 0i64..=64, b in 0i64..=64, k in kind()) {
                prop_assume!(a < b);
                let x = expand_exact(&r, &point(&r, a), k, 120).unwrap().sequence();
                let y = expand_exact(&r, &point(&r, b), k, 120).unwrap().sequence();
                let c = crate::sequences::lex_compare(&x, &y, 120);
                prop_assert!(c == Ordering3::Less || c == Ordering3::Unknown);
                prop_assert_ne!(c, Ordering3::Unknown, "expansions agree through 120 digits");
            }

            #[test]
            fn expansions_pass_their_own_validator(r in pair_system(), t in 0i64..=64, k in kind()) {
                let validator = Validator::new(&r, 60).unwrap();
                let state = expand_exact(&r, &point(&r, t), k, 60).unwrap();
                let verdict = validator.validate(&state.sequence(), k).unwrap();
                prop_assert!(!matches!(verdict, Validity::Invalid(_)), "{:?}", verdict);
            }

            #[test]
            fn greedy_reflects_to_lazy_in_the_dual(r in pair_system(), t in 0i64..=64) {
                let x = point(&r, t);
                let dual = r.dual();
                let greedy = expand(&r, &x, ExpansionKind::Greedy, 30).unwrap();
                let lazy = expand(&dual, &-&x, ExpansionKind::Lazy, 30).unwrap();
                let reflected: Vec<Digit> = greedy.digits().iter().map(|d| 1 - d).collect();
                prop_assert_eq!(reflected, lazy.digits().to_vec());
            }

            #[test]
            fn characteristic_sequences_are_self_valid(r in pair_system()) {
                let validator = Validator::new(&r, 60).unwrap();
                let v = validator.validate(validator.alpha(0), ExpansionKind::QuasiGreedy).unwrap();
                prop_assert!(!matches!(v, Validity::Invalid(_)));
                let v = validator.validate(validator.gamma(1), ExpansionKind::QuasiLazy).unwrap();
                prop_assert!(!matches!(v, Validity::Invalid(_)));
            }

            #[test]
            fn greedy_and_quasi_greedy_are_related(r in pair_system(), t in 0i64..=64, k in 1usize..8) {
                // a greedy prefix followed by 0^∞ is again greedy
                let w = expand(&r, &point(&r, t), ExpansionKind::Greedy, k).unwrap().digits().to_vec();
                prop_assume!(w.iter().any(|&d| d > 0));
                let finite = DigitSequence::with_constant_tail(w, 0);
                let x = r.system().pi_eval(&finite).unwrap();
                let greedy = expand_exact(&r, &x, ExpansionKind::Greedy, 40).unwrap();
                prop_assert_eq!(greedy.sequence(), finite.clone());
                let rebuilt = quasi_greedy_from_greedy(&r, &finite, 40).unwrap();
                let quasi = expand(&r, &x, ExpansionKind::QuasiGreedy, 40).unwrap();
                prop_assert_eq!(rebuilt.take(40), quasi.digits().to_vec());
            }
        }
    }
}
