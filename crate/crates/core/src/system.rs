//! Alphabet-base systems `S = {(d_0, q_0), …, (d_M, q_M)}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{NumericError, Ordering3, Scalar, DEFAULT_PRECISION_BITS};
use crate::sequences::{Digit, DigitSequence, SequenceError, Tail};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SystemError {
    #[error("a system needs at least two digits, got {0}")]
    TooFewDigits(usize),
    #[error("at most 256 digits are supported, got {0}")]
    TooManyDigits(usize),
    #[error("digits and bases have different lengths ({digits} vs {bases})")]
    LengthMismatch { digits: usize, bases: usize },
    #[error("base q_{index} = {value} is not greater than 1")]
    BaseNotAboveOne { index: usize, value: String },
    #[error("digit index {index} is outside 0..={max}")]
    DigitIndexOutOfRange { index: usize, max: usize },
    #[error("the system is not regular")]
    NotRegular,
    #[error("cannot decide {0} at the current precision")]
    Undetermined(String),
    #[error("malformed system description: {0}")]
    Malformed(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

/// The JSON form `{"digits": ["0","1"], "bases": ["3/2","9/5"]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub digits: Vec<String>,
    pub bases: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphabetBaseSystem {
    digits: Vec<Scalar>,
    bases: Vec<Scalar>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSummary {
    pub lambda: Scalar,
    pub big_lambda: Scalar,
    pub semi_regular: bool,
    pub regular: bool,
}

fn decide(o: Option<bool>, what: impl FnOnce() -> String) -> Result<bool, SystemError> {
    o.ok_or_else(|| SystemError::Undetermined(what()))
}

impl AlphabetBaseSystem {
    pub fn new(digits: Vec<Scalar>, bases: Vec<Scalar>) -> Result<Self, SystemError> {
        if digits.len() != bases.len() {
            return Err(SystemError::LengthMismatch {
                digits: digits.len(),
                bases: bases.len(),
            });
        }
        if digits.len() < 2 {
            return Err(SystemError::TooFewDigits(digits.len()));
        }
        if digits.len() > Digit::MAX as usize + 1 {
            return Err(SystemError::TooManyDigits(digits.len()));
        }
        for (index, q) in bases.iter().enumerate() {
            let above = decide(q.compare(&Scalar::one()).is_gt(), || format!("whether q_{index} > 1"))?;
            if !above {
                return Err(SystemError::BaseNotAboveOne {
                    index,
                    value: q.to_string(),
                });
            }
        }
        Ok(AlphabetBaseSystem { digits, bases })
    }

    pub fn from_pairs(pairs: Vec<(Scalar, Scalar)>) -> Result<Self, SystemError> {
        let (digits, bases) = pairs.into_iter().unzip();
        AlphabetBaseSystem::new(digits, bases)
    }

    /// Builds a system from literal pairs such as `[("0", "3/2"), ("1", "9/5")]`.
    pub fn parse_pairs(pairs: &[(&str, &str)]) -> Result<Self, SystemError> {
        let mut digits = Vec::with_capacity(pairs.len());
        let mut bases = Vec::with_capacity(pairs.len());
        for (d, q) in pairs {
            digits.push(Scalar::from_str(d)?);
            bases.push(Scalar::from_str(q)?);
        }
        AlphabetBaseSystem::new(digits, bases)
    }

    pub fn from_spec(spec: &SystemSpec) -> Result<Self, SystemError> {
        if spec.digits.len() != spec.bases.len() {
            return Err(SystemError::LengthMismatch {
                digits: spec.digits.len(),
                bases: spec.bases.len(),
            });
        }
        let pairs: Vec<(&str, &str)> = spec
            .digits
            .iter()
            .zip(&spec.bases)
            .map(|(d, q)| (d.as_str(), q.as_str()))
            .collect();
        AlphabetBaseSystem::parse_pairs(&pairs)
    }

    /// Entries may be JSON strings in the literal syntax or plain JSON numbers.
    pub fn from_json(text: &str) -> Result<Self, SystemError> {
        let mut value: serde_json::Value = serde_json::from_str(text).map_err(|e| SystemError::Malformed(e.to_string()))?;
        for key in ["digits", "bases"] {
            if let Some(serde_json::Value::Array(items)) = value.get_mut(key) {
                for item in items.iter_mut() {
                    if let serde_json::Value::Number(n) = item {
                        *item = serde_json::Value::String(n.to_string());
                    }
                }
            }
        }
        let spec: SystemSpec = serde_json::from_value(value).map_err(|e| SystemError::Malformed(e.to_string()))?;
        AlphabetBaseSystem::from_spec(&spec)
    }

    /// Exact systems round-trip; interval entries are written as their bounds.
    pub fn to_spec(&self) -> SystemSpec {
        SystemSpec {
            digits: self.digits.iter().map(|d| d.to_string()).collect(),
            bases: self.bases.iter().map(|q| q.to_string()).collect(),
        }
    }

    /// `M`, the largest digit index.
    pub fn max_digit(&self) -> Digit {
        (self.digits.len() - 1) as Digit
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn digit_value(&self, j: usize) -> &Scalar {
        &self.digits[j]
    }

    pub fn base(&self, j: usize) -> &Scalar {
        &self.bases[j]
    }

    pub fn digit_values(&self) -> &[Scalar] {
        &self.digits
    }

    pub fn bases(&self) -> &[Scalar] {
        &self.bases
    }

    /// True when every `d_j` and `q_j` is rational.
    pub fn is_rational(&self) -> bool {
        self.digits.iter().chain(&self.bases).all(|s| s.as_rational().is_some())
    }

    fn check_index(&self, j: usize) -> Result<(), SystemError> {
        if j < self.len() {
            Ok(())
        } else {
            Err(SystemError::DigitIndexOutOfRange {
                index: j,
                max: self.len() - 1,
            })
        }
    }

    /// `π(j^∞) = d_j / (q_j − 1)`.
    pub fn fixed_point_value(&self, j: usize) -> Result<Scalar, SystemError> {
        self.check_index(j)?;
        Ok(self.digits[j].checked_div(&(&self.bases[j] - &Scalar::one()))?)
    }

    /// `(λ, Λ)`: the smallest and largest of the fixed-point values. An
    /// undecided comparison between intervals yields their hull.
    pub fn bounds(&self) -> (Scalar, Scalar) {
        let values: Vec<Scalar> = (0..self.len())
            .map(|j| self.fixed_point_value(j).expect("index in range and q_j > 1"))
            .collect();
        let lo = values[1..].iter().fold(values[0].clone(), |acc, v| acc.min(v));
        let hi = values[1..].iter().fold(values[0].clone(), |acc, v| acc.max(v));
        (lo, hi)
    }

    /// `(d_j + x) / q_j`: the value of digit `j` followed by a tail worth `x`.
    pub fn digit_map(&self, j: usize, x: &Scalar) -> Scalar {
        (&self.digits[j] + x).checked_div(&self.bases[j]).expect("q_j > 1")
    }

    /// `q_j·x − d_j`: the remainder after emitting digit `j`.
    pub fn remainder(&self, j: usize, x: &Scalar) -> Scalar {
        &self.bases[j] * x - &self.digits[j]
    }

    fn chain_holds(&self, offset: &Scalar, label: &str) -> Result<bool, SystemError> {
        for j in 0..self.len() - 1 {
            let c = self.digit_map(j, offset).compare(&self.digit_map(j + 1, offset));
            if !decide(c.is_lt(), || format!("the {label} chain at j = {j}"))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `(d_j+λ)/q_j` and `(d_j+Λ)/q_j` both strictly increasing in `j`.
    pub fn is_semi_regular(&self) -> Result<bool, SystemError> {
        let (lambda, big_lambda) = self.bounds();
        Ok(self.chain_holds(&lambda, "λ")? && self.chain_holds(&big_lambda, "Λ")?)
    }

    /// Semi-regular and `(d_j+Λ)/q_j ≥ (d_{j+1}+λ)/q_{j+1}` for all `j < M`.
    pub fn is_regular(&self) -> Result<bool, SystemError> {
        if !self.is_semi_regular()? {
            return Ok(false);
        }
        let (lambda, big_lambda) = self.bounds();
        for j in 0..self.len() - 1 {
            let c = self.digit_map(j, &big_lambda).compare(&self.digit_map(j + 1, &lambda));
            if !decide(c.is_ge(), || format!("the overlap condition at j = {j}"))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn summary(&self) -> Result<SystemSummary, SystemError> {
        let (lambda, big_lambda) = self.bounds();
        let semi_regular = self.is_semi_regular()?;
        let regular = semi_regular && self.is_regular()?;
        Ok(SystemSummary {
            lambda,
            big_lambda,
            semi_regular,
            regular,
        })
    }

    /// `S'` with `d'_j = −d_{M−j}` and `q'_j = q_{M−j}`.
    pub fn dual(&self) -> AlphabetBaseSystem {
        AlphabetBaseSystem {
            digits: self.digits.iter().rev().map(|d| -d).collect(),
            bases: self.bases.iter().rev().cloned().collect(),
        }
    }

    fn check_digits(&self, seq: &DigitSequence) -> Result<(), SystemError> {
        seq.check_alphabet(self.max_digit())?;
        Ok(())
    }

    /// Value of `prefix` followed by a tail worth `tail_value`.
    pub fn fold_prefix(&self, prefix: &[Digit], tail_value: &Scalar) -> Scalar {
        prefix
            .iter()
            .rev()
            .fold(tail_value.clone(), |v, &j| self.digit_map(j as usize, &v))
    }

    /// `π` of a sequence. Exact for constant and periodic tails; for a
    /// truncated sequence the enclosure `[π(p) + λ/Q, π(p) + Λ/Q]` of every
    /// continuation of the known digits `p` (with `Q` the product of their bases).
    pub fn pi_eval(&self, seq: &DigitSequence) -> Result<Scalar, SystemError> {
        self.check_digits(seq)?;
        match seq.tail() {
            Tail::Constant(j) => Ok(self.fold_prefix(seq.prefix(), &self.fixed_point_value(*j as usize)?)),
            Tail::Periodic(block) => Ok(self.fold_prefix(seq.prefix(), &self.periodic_value(block))),
            Tail::Truncated => {
                let (lo, hi) = self.prefix_range(seq.prefix());
                let p = lo
                    .precision_bits()
                    .or(hi.precision_bits())
                    .unwrap_or(DEFAULT_PRECISION_BITS);
                Ok(Scalar::enclosure(lo.bounds().0, hi.bounds().1, p))
            }
        }
    }

    /// `π((block)^∞)`, the fixed point of `y ↦ fold(block, y)`.
    pub fn periodic_value(&self, block: &[Digit]) -> Scalar {
        // fold(block, y) = a + y/Q, so y = a·Q/(Q − 1)
        let a = self.fold_prefix(block, &Scalar::zero());
        let q = block
            .iter()
            .fold(Scalar::one(), |acc, &j| acc * &self.bases[j as usize]);
        (a * &q).checked_div(&(q - Scalar::one())).expect("Q > 1")
    }

    /// Exact lower and upper values `π(p) + λ/Q`, `π(p) + Λ/Q` over all continuations of `p`.
    pub fn prefix_range(&self, prefix: &[Digit]) -> (Scalar, Scalar) {
        let (lambda, big_lambda) = self.bounds();
        (self.fold_prefix(prefix, &lambda), self.fold_prefix(prefix, &big_lambda))
    }
}

impl fmt::Display for AlphabetBaseSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (j, (d, q)) in self.digits.iter().zip(&self.bases).enumerate() {
            if j > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({d}, {q})")?;
        }
        f.write_str("}")
    }
}

/// A system known to be regular, with `λ`, `Λ` and the digit windows cached.
#[derive(Debug, Clone)]
pub struct RegularSystem {
    system: AlphabetBaseSystem,
    lambda: Scalar,
    big_lambda: Scalar,
    greedy_thresholds: Vec<Scalar>,
    lazy_thresholds: Vec<Scalar>,
}

impl RegularSystem {
    pub fn new(system: AlphabetBaseSystem) -> Result<Self, SystemError> {
        if !system.is_regular()? {
            return Err(SystemError::NotRegular);
        }
        // λ and Λ are attained at the extreme digits of a semi-regular system
        let lambda = system.fixed_point_value(0)?;
        let big_lambda = system.fixed_point_value(system.len() - 1)?;
        let greedy_thresholds = (0..system.len()).map(|j| system.digit_map(j, &lambda)).collect();
        let lazy_thresholds = (0..system.len()).map(|j| system.digit_map(j, &big_lambda)).collect();
        Ok(RegularSystem {
            system,
            lambda,
            big_lambda,
            greedy_thresholds,
            lazy_thresholds,
        })
    }

    pub fn system(&self) -> &AlphabetBaseSystem {
        &self.system
    }

    pub fn into_system(self) -> AlphabetBaseSystem {
        self.system
    }

    pub fn lambda(&self) -> &Scalar {
        &self.lambda
    }

    pub fn big_lambda(&self) -> &Scalar {
        &self.big_lambda
    }

    pub fn max_digit(&self) -> Digit {
        self.system.max_digit()
    }

    /// `(d_j + λ) / q_j`, the smallest value whose expansion can start with `j`.
    pub fn greedy_threshold(&self, j: usize) -> &Scalar {
        &self.greedy_thresholds[j]
    }

    /// `(d_j + Λ) / q_j`, the largest value whose expansion can start with `j`.
    pub fn lazy_threshold(&self, j: usize) -> &Scalar {
        &self.lazy_thresholds[j]
    }

    pub fn dual(&self) -> RegularSystem {
        RegularSystem::new(self.system.dual()).expect("the dual of a regular system is regular")
    }

    /// Position of `x` relative to `[λ, Λ]`: `Less` below, `Greater` above,
    /// `Equal` inside.
    pub fn locate(&self, x: &Scalar) -> Ordering3 {
        match x.compare(&self.lambda) {
            Ordering3::Less => Ordering3::Less,
            Ordering3::Unknown => Ordering3::Unknown,
            _ => match x.compare(&self.big_lambda) {
                Ordering3::Greater => Ordering3::Greater,
                Ordering3::Unknown => Ordering3::Unknown,
                _ => Ordering3::Equal,
            },
        }
    }
}

impl fmt::Display for RegularSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.system.fmt(f)
    }
}
