//! Cardinality of the set of unique expansions.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::expansion::{alpha_j, gamma_j, ExpansionError};
use crate::numerics::{sqrt_exact, sqrt_interval, Ordering3, Scalar};
use crate::sequences::{alpha_gr, alpha_kl, lex_compare_at, Digit, DigitSequence};
use crate::system::{AlphabetBaseSystem, RegularSystem, SystemError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UniquenessClass {
    /// Only `0^∞` and `M^∞`.
    TrivialOnly,
    Infinite,
    Countable,
    Continuum,
    /// Decided comparisons show that none of the sufficient conditions apply.
    NotCovered,
    /// Evidence ran out at this comparison depth.
    Undetermined(usize),
}

impl fmt::Display for UniquenessClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UniquenessClass::TrivialOnly => f.write_str("TrivialOnly"),
            UniquenessClass::Infinite => f.write_str("Infinite"),
            UniquenessClass::Countable => f.write_str("Countable"),
            UniquenessClass::Continuum => f.write_str("Continuum"),
            UniquenessClass::NotCovered => f.write_str("NotCovered"),
            UniquenessClass::Undetermined(d) => write!(f, "Undetermined({d})"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassificationError {
    #[error("base {q} is outside (1, {max}]")]
    BaseOutOfRange { q: String, max: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
}

/// `S_{M,q} = {(0,q), …, (M,q)}` for `1 < q ≤ M+1`.
pub fn classical_system(max: Digit, q: &Scalar) -> Result<AlphabetBaseSystem, ClassificationError> {
    let upper = Scalar::from_integer(max as i64 + 1);
    let inside = q.compare(&Scalar::one()).is_gt() == Some(true) && q.compare(&upper).is_le() == Some(true);
    if max == 0 || !inside {
        return Err(ClassificationError::BaseOutOfRange {
            q: q.to_string(),
            max: upper.to_string(),
        });
    }
    let digits = (0..=max as i64).map(Scalar::from_integer).collect();
    Ok(AlphabetBaseSystem::new(digits, vec![q.clone(); max as usize + 1])?)
}

/// The generalized golden ratio as an exact value: `(k+√(k²+4k))/2` for
/// `M = 2k−1`, `k+1` for `M = 2k`.
pub fn q_gr_exact(max: Digit) -> Scalar {
    assert!(max >= 1, "alphabet needs at least two digits");
    let k = (max as i64 + 1) / 2;
    if max % 2 == 1 {
        let root = sqrt_exact(&BigRational::from_integer(BigInt::from(k * k + 4 * k))).expect("positive radicand");
        (Scalar::from_integer(k) + root) * Scalar::ratio(1, 2)
    } else {
        Scalar::from_integer(max as i64 / 2 + 1)
    }
}

/// The generalized golden ratio: an enclosure for odd `M`, exact for even `M`.
pub fn q_gr(max: Digit, precision_bits: u32) -> Scalar {
    assert!(max >= 1, "alphabet needs at least two digits");
    if max.is_multiple_of(2) {
        return q_gr_exact(max);
    }
    let k = (max as i64 + 1) / 2;
    // widen the root by two bits so the halved sum still meets the precision
    let root = sqrt_interval(&BigRational::from_integer(BigInt::from(k * k + 4 * k)), precision_bits + 2)
        .expect("positive radicand");
    let (lo, hi) = root.bounds();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let k = BigRational::from_integer(BigInt::from(k));
    Scalar::enclosure((&k + lo) * &half, (&k + hi) * &half, precision_bits)
}

/// Sign of `Σ α_KL,i q^{−i} − 1` at a rational `q > 1`, or `None` when the
/// certified enclosure contains zero.
fn kl_sign(digits: &[Digit], max: Digit, q: &BigRational, work_bits: u32) -> Option<Ordering3> {
    // fixed-point Horner from the tail inward; tails are worth between 0 and M/(q−1)
    let (a, b) = (q.numer().clone(), q.denom().clone());
    let scale = BigInt::one() << work_bits;
    let tail_max = BigRational::from_integer(BigInt::from(max)) / (q - BigRational::one());
    let mut lo = BigInt::zero();
    let mut hi = (tail_max * BigRational::from_integer(scale.clone())).ceil().to_integer();
    for &d in digits.iter().rev() {
        let shift = BigInt::from(d) * &scale;
        lo = ((&shift + &lo) * &b).div_floor(&a);
        hi = ((&shift + &hi) * &b).div_ceil(&a);
    }
    if lo > scale {
        Some(Ordering3::Greater)
    } else if hi < scale {
        Some(Ordering3::Less)
    } else {
        None
    }
}

/// The threshold q_KL: the root in `(q_GR, M+1]` of
/// `Σ α_KL,i q^{−i} = 1`, enclosed by certified bisection.
pub fn q_kl(max: Digit, precision_bits: u32) -> Scalar {
    assert!(max >= 1, "alphabet needs at least two digits");
    let terms = 4 * precision_bits as usize;
    let digits = alpha_kl(max, terms).prefix().to_vec();
    let work_bits = 2 * precision_bits + 64;
    let mut lo = q_gr(max, precision_bits).bounds().0;
    let mut hi = BigRational::from_integer(BigInt::from(max as i64 + 1));
    let target = BigRational::new(BigInt::one(), BigInt::one() << (precision_bits + 1));
    let two = BigRational::from_integer(BigInt::from(2));
    while &hi - &lo > target {
        let mid = (&lo + &hi) / &two;
        // a coarse dyadic midpoint keeps the Horner integers short
        let mid = dyadic_round(&mid, precision_bits + 8);
        match kl_sign(&digits, max, &mid, work_bits) {
            // the series decreases in q
            Some(Ordering3::Greater) => lo = mid,
            Some(Ordering3::Less) => hi = mid,
            _ => break,
        }
    }
    Scalar::enclosure(lo, hi, precision_bits)
}

fn dyadic_round(r: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits;
    let n = (r * BigRational::from_integer(scale.clone())).floor().to_integer();
    BigRational::new(n, scale)
}

/// Case, label, left and right sequences, and the predicate on their order.
type Check<'a> = (u8, String, &'a DigitSequence, &'a DigitSequence, fn(Ordering3) -> Option<bool>);

/// One lexicographic comparison used as evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// Sufficient-condition case: 1 (trivial) to 4 (continuum).
    pub case: u8,
    pub label: String,
    pub outcome: Ordering3,
    /// 1-based index of the first differing digit, when decided.
    pub position: Option<usize>,
    pub satisfied: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    TwoElement,
    CharacteristicBounds,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub class: UniquenessClass,
    pub method: Method,
    pub depth: usize,
    /// Verdict of each case (trivial, infinite, countable, continuum).
    pub cases: [Option<bool>; 4],
    pub comparisons: Vec<Comparison>,
}

fn all_of(verdicts: impl Iterator<Item = Option<bool>>) -> Option<bool> {
    let mut undecided = false;
    for v in verdicts {
        match v {
            Some(false) => return Some(false),
            None => undecided = true,
            Some(true) => {}
        }
    }
    if undecided {
        None
    } else {
        Some(true)
    }
}

/// Compares every `α^j` and `γ^{M−j}` with the golden-ratio and
/// KL reference sequences.
fn characteristic_bounds(system: &RegularSystem, depth: usize) -> Result<Classification, ClassificationError> {
    let m = system.max_digit();
    let gr = alpha_gr(m);
    let gr_bar = gr.reflect(m);
    let kl = alpha_kl(m, depth);
    let kl_bar = kl.reflect(m);
    let mut comparisons = Vec::new();
    let mut per_case: [Vec<Option<bool>>; 4] = Default::default();
    for j in 0..m as usize {
        let alpha = alpha_j(system, j, depth)?.sequence();
        let gamma = gamma_j(system, m as usize - j, depth)?.sequence();
        let g = m as usize - j;
        let checks: [Check<'_>; 8] = [
            (1, format!("α^{j} ⪯ α_GR"), &alpha, &gr, Ordering3::is_le),
            (1, format!("γ^{g} ⪰ reflected α_GR"), &gamma, &gr_bar, Ordering3::is_ge),
            (2, format!("α^{j} ≻ α_GR"), &alpha, &gr, Ordering3::is_gt),
            (2, format!("γ^{g} ≺ reflected α_GR"), &gamma, &gr_bar, Ordering3::is_lt),
            (3, format!("α^{j} ≺ α_KL"), &alpha, &kl, Ordering3::is_lt),
            (3, format!("γ^{g} ≻ reflected α_KL"), &gamma, &kl_bar, Ordering3::is_gt),
            (4, format!("α^{j} ⪰ α_KL"), &alpha, &kl, Ordering3::is_ge),
            (4, format!("γ^{g} ⪯ reflected α_KL"), &gamma, &kl_bar, Ordering3::is_le),
        ];
        for (case, label, a, b, test) in checks {
            let (outcome, position) = lex_compare_at(a, b, depth);
            let satisfied = test(outcome);
            per_case[case as usize - 1].push(satisfied);
            comparisons.push(Comparison {
                case,
                label,
                outcome,
                position,
                satisfied,
            });
        }
    }
    let cases = per_case.map(|v| all_of(v.into_iter()));
    assert!(
        !(cases[0] == Some(true) && cases[1] == Some(true)),
        "the trivial and infinite cases exclude each other"
    );
    // the trivial case implies the countable one (α_GR ≺ α_KL), so it goes first
    let class = if cases[0] == Some(true) {
        UniquenessClass::TrivialOnly
    } else if cases[3] == Some(true) {
        UniquenessClass::Continuum
    } else if cases[2] == Some(true) {
        UniquenessClass::Countable
    } else if cases[1] == Some(true) {
        UniquenessClass::Infinite
    } else if cases.iter().all(|c| *c == Some(false)) {
        UniquenessClass::NotCovered
    } else {
        UniquenessClass::Undetermined(depth)
    };
    Ok(Classification {
        class,
        method: Method::CharacteristicBounds,
        depth,
        cases,
        comparisons,
    })
}

fn in_unit_to_two(q: &Scalar) -> Option<bool> {
    let above = q.compare(&Scalar::one()).is_gt()?;
    let below = q.compare(&Scalar::from_integer(2)).is_le()?;
    Some(above && below)
}

fn two_element_applies(system: &AlphabetBaseSystem) -> Option<bool> {
    if system.max_digit() != 1 {
        return Some(false);
    }
    Some(in_unit_to_two(system.base(0))? && in_unit_to_two(system.base(1))?)
}

/// `q_a > 1 + 1/q_b`
fn exceeds_threshold(q_a: &Scalar, q_b: &Scalar) -> Option<bool> {
    let threshold = Scalar::one() + q_b.recip().expect("bases exceed 1");
    q_a.compare(&threshold).is_gt()
}

/// Exact two-element criterion: infinite iff `q_0 > 1 + 1/q_1` and
/// `q_1 > 1 + 1/q_0`, otherwise only the trivial expansions are unique.
/// Systems outside its scope (`M ≠ 1` or a base outside `(1, 2]`) fall back
/// to [`classify`].
pub fn classify_two_element(system: &RegularSystem, depth: usize) -> Result<UniquenessClass, ClassificationError> {
    match two_element_applies(system.system()) {
        Some(true) => {}
        Some(false) => return Ok(classify(system, depth)?.class),
        None => return Ok(UniquenessClass::Undetermined(depth)),
    }
    let (q0, q1) = (system.system().base(0), system.system().base(1));
    Ok(match (exceeds_threshold(q0, q1), exceeds_threshold(q1, q0)) {
        (Some(true), Some(true)) => UniquenessClass::Infinite,
        (Some(false), _) | (_, Some(false)) => UniquenessClass::TrivialOnly,
        _ => UniquenessClass::Undetermined(depth),
    })
}

/// Two-element criterion for digit values `d_1 ≥ 0 ≥ d_0`: only the base
/// that is not larger matters.
pub fn two_element_special(system: &AlphabetBaseSystem) -> Result<UniquenessClass, ClassificationError> {
    let precondition = |what: &str| Err(ClassificationError::Precondition(what.to_string()));
    if system.max_digit() != 1 {
        return precondition("exactly two digits are required");
    }
    if two_element_applies(system) != Some(true) {
        return precondition("both bases must lie in (1, 2]");
    }
    let (d0, d1) = (system.digit_value(0), system.digit_value(1));
    if d0.compare(&Scalar::zero()).is_le() != Some(true) || d1.compare(&Scalar::zero()).is_ge() != Some(true) {
        return precondition("digit values must satisfy d_1 ≥ 0 ≥ d_0");
    }
    if d0.is_zero() == Some(true) && d1.is_zero() == Some(true) {
        return precondition("digit values must not both vanish");
    }
    let (q0, q1) = (system.base(0), system.base(1));
    let verdict = match q1.compare(q0) {
        Ordering3::Greater | Ordering3::Equal => exceeds_threshold(q0, q1),
        Ordering3::Less => exceeds_threshold(q1, q0),
        Ordering3::Unknown => None,
    };
    Ok(match verdict {
        Some(true) => UniquenessClass::Infinite,
        Some(false) => UniquenessClass::TrivialOnly,
        None => UniquenessClass::Undetermined(0),
    })
}

/// Classifies the set of unique expansions.
///
/// Two-element systems with bases in `(1, 2]` get the exact trivial/infinite
/// dichotomy first; an infinite verdict is then refined to countable or
/// continuum when the characteristic bounds decide it. Other systems use the
/// characteristic bounds alone, reporting the most specific case that holds:
/// trivial, then continuum, then countable, then infinite.
pub fn classify(system: &RegularSystem, depth: usize) -> Result<Classification, ClassificationError> {
    let mut result = characteristic_bounds(system, depth)?;
    if two_element_applies(system.system()) == Some(true) {
        let exact = classify_two_element(system, depth)?;
        result.method = Method::TwoElement;
        result.class = match (exact, result.class) {
            (UniquenessClass::Infinite, c @ (UniquenessClass::Countable | UniquenessClass::Continuum)) => c,
            (UniquenessClass::Undetermined(_), c) => c,
            (e, _) => e,
        };
    }
    Ok(result)
}
