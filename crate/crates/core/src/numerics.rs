//! Exact and certified scalar arithmetic.
//!
//! Every real quantity in an alphabet-base system (digit values, bases, the
//! running remainders of an expansion) is a [`Scalar`]. There are three forms:
//!
//! - `Rational`: an exact, reduced fraction;
//! - `Surd`: an exact element `a + b·√n` of a real quadratic field, so that
//!   bases such as the golden ratio keep decidable equality;
//! - `Interval`: a certified enclosure `[lo, hi]` with dyadic endpoints.
//!
//! Arithmetic between exact operands stays exact whenever the result is
//! representable (rationals, or surds over the same radicand). Anything else
//! falls back to outward-rounded interval arithmetic. Comparisons are
//! three-valued: an interval that overlaps the other operand yields
//! [`Ordering3::Unknown`] and never a guess.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Working precision used when nothing else is specified.
pub const DEFAULT_PRECISION_BITS: u32 = 128;

/// Largest prime candidate tried when extracting square factors of a radicand.
const TRIAL_DIVISION_LIMIT: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericError {
    #[error("square root of a negative number")]
    NegativeSqrt,
    #[error("division by zero")]
    DivisionByZero,
    #[error("division by an interval containing zero")]
    DivisorStraddlesZero,
    #[error("square root argument must be rational, got {0}")]
    IrrationalSqrtArgument(String),
    #[error("precision must be positive")]
    ZeroPrecision,
    #[error("cannot parse scalar {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// Result of comparing two scalars.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ordering3 {
    Less,
    Equal,
    Greater,
    Unknown,
}

impl Ordering3 {
    pub fn is_decided(self) -> bool {
        self != Ordering3::Unknown
    }

    pub fn reverse(self) -> Self {
        match self {
            Ordering3::Less => Ordering3::Greater,
            Ordering3::Greater => Ordering3::Less,
            other => other,
        }
    }

    pub fn to_ordering(self) -> Option<Ordering> {
        match self {
            Ordering3::Less => Some(Ordering::Less),
            Ordering3::Equal => Some(Ordering::Equal),
            Ordering3::Greater => Some(Ordering::Greater),
            Ordering3::Unknown => None,
        }
    }

    /// `Some(true)` if the relation is `<`, `Some(false)` if it is decided otherwise.
    pub fn is_lt(self) -> Option<bool> {
        self.to_ordering().map(|o| o == Ordering::Less)
    }

    pub fn is_le(self) -> Option<bool> {
        self.to_ordering().map(|o| o != Ordering::Greater)
    }

    pub fn is_gt(self) -> Option<bool> {
        self.to_ordering().map(|o| o == Ordering::Greater)
    }

    pub fn is_ge(self) -> Option<bool> {
        self.to_ordering().map(|o| o != Ordering::Less)
    }

    pub fn is_eq(self) -> Option<bool> {
        self.to_ordering().map(|o| o == Ordering::Equal)
    }
}

impl From<Ordering> for Ordering3 {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => Ordering3::Less,
            Ordering::Equal => Ordering3::Equal,
            Ordering::Greater => Ordering3::Greater,
        }
    }
}

impl fmt::Display for Ordering3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Ordering3::Less => "<",
            Ordering3::Equal => "=",
            Ordering3::Greater => ">",
            Ordering3::Unknown => "?",
        };
        f.write_str(s)
    }
}

/// `rational + coefficient·√radicand` with `coefficient ≠ 0` and `radicand > 1`
/// free of small square factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Surd {
    rational: BigRational,
    coefficient: BigRational,
    radicand: BigInt,
}

impl Surd {
    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn coefficient(&self) -> &BigRational {
        &self.coefficient
    }

    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }

    fn sign(&self) -> Ordering {
        surd_sign(&self.rational, &self.coefficient, &self.radicand)
    }

    fn enclose(&self, precision_bits: u32) -> Interval {
        let root = sqrt_bounds(&BigRational::from_integer(self.radicand.clone()), precision_bits + 8);
        let (lo_root, hi_root) = if self.coefficient.is_negative() {
            (&root.1, &root.0)
        } else {
            (&root.0, &root.1)
        };
        let lo = &self.rational + &self.coefficient * lo_root;
        let hi = &self.rational + &self.coefficient * hi_root;
        Interval::round_outward(lo, hi, precision_bits)
    }
}

/// Sign of `a + b·√n` for `n` not a perfect square.
fn surd_sign(a: &BigRational, b: &BigRational, n: &BigInt) -> Ordering {
    let sa = a.signum();
    let sb = b.signum();
    if !sa.is_negative() && !sb.is_negative() {
        return if sa.is_zero() && sb.is_zero() { Ordering::Equal } else { Ordering::Greater };
    }
    if !sa.is_positive() && !sb.is_positive() {
        return Ordering::Less;
    }
    let a2 = a * a;
    let b2n = b * b * BigRational::from_integer(n.clone());
    if sa.is_positive() {
        a2.cmp(&b2n)
    } else {
        b2n.cmp(&a2)
    }
}

/// Certified enclosure with dyadic endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
    precision_bits: u32,
}

impl Interval {
    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, value: &BigRational) -> bool {
        &self.lo <= value && value <= &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Rounds `[lo, hi]` outward to a dyadic grid fine enough for `precision_bits`
    /// and records the precision the result actually certifies.
    pub fn round_outward(lo: BigRational, hi: BigRational, precision_bits: u32) -> Self {
        debug_assert!(lo <= hi);
        let scale = BigInt::one() << (precision_bits as usize + 2);
        let scale_q = BigRational::from_integer(scale.clone());
        let lo = BigRational::new((&lo * &scale_q).floor().to_integer(), scale.clone());
        let hi = BigRational::new((&hi * &scale_q).ceil().to_integer(), scale);
        let precision_bits = effective_precision(&lo, &hi, precision_bits);
        Interval { lo, hi, precision_bits }
    }

    fn point(value: &BigRational, precision_bits: u32) -> Self {
        Interval::round_outward(value.clone(), value.clone(), precision_bits)
    }

    fn compare(&self, other: &Interval) -> Ordering3 {
        if self.hi < other.lo {
            Ordering3::Less
        } else if self.lo > other.hi {
            Ordering3::Greater
        } else if self.is_point() && other.is_point() && self.lo == other.lo {
            Ordering3::Equal
        } else {
            Ordering3::Unknown
        }
    }

    fn add(&self, other: &Interval) -> Interval {
        let p = self.precision_bits.min(other.precision_bits);
        Interval::round_outward(&self.lo + &other.lo, &self.hi + &other.hi, p)
    }

    fn neg(&self) -> Interval {
        Interval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
            precision_bits: self.precision_bits,
        }
    }

    fn mul(&self, other: &Interval) -> Interval {
        let p = self.precision_bits.min(other.precision_bits);
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = products.iter().min().cloned().expect("four products");
        let hi = products.iter().max().cloned().expect("four products");
        Interval::round_outward(lo, hi, p)
    }

    fn recip(&self) -> Result<Interval, NumericError> {
        if !self.lo.is_positive() && !self.hi.is_negative() {
            return Err(NumericError::DivisorStraddlesZero);
        }
        Ok(Interval::round_outward(self.hi.recip(), self.lo.recip(), self.precision_bits))
    }
}

/// Largest `b ≤ requested` with `hi − lo ≤ 2^(1−b)·max(1, |lo|)`, floored at 1.
fn effective_precision(lo: &BigRational, hi: &BigRational, requested: u32) -> u32 {
    let width = hi - lo;
    if width.is_zero() {
        return requested;
    }
    let magnitude = lo.abs().max(BigRational::one());
    let b = 1 + floor_log2(&(magnitude / width));
    b.clamp(1, requested as i64) as u32
}

/// `floor(log2(r))` for positive `r`.
fn floor_log2(r: &BigRational) -> i64 {
    debug_assert!(r.is_positive());
    let num_bits = r.numer().bits() as i64;
    let den_bits = r.denom().bits() as i64;
    let mut guess = num_bits - den_bits;
    // r ∈ [2^(guess-1), 2^(guess+1)); settle the boundary exactly.
    let pow = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(BigInt::one() << e as usize)
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
        }
    };
    if r < &pow(guess) {
        guess -= 1;
    }
    guess
}

/// Lower and upper dyadic bounds on `√n` with denominator `2^(precision_bits+1)`.
fn sqrt_bounds(n: &BigRational, precision_bits: u32) -> (BigRational, BigRational) {
    let k = precision_bits as usize + 1;
    let scale = BigInt::one() << k;
    let scaled = n * BigRational::from_integer(BigInt::one() << (2 * k));
    let m_floor = scaled.floor().to_integer();
    let m_ceil = scaled.ceil().to_integer();
    let lo = m_floor.sqrt();
    let s = m_ceil.sqrt();
    let hi = if &s * &s == m_ceil { s } else { s + 1 };
    (BigRational::new(lo, scale.clone()), BigRational::new(hi, scale))
}

/// A real quantity: exact rational, exact quadratic surd, or certified interval.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Rational(BigRational),
    Surd(Surd),
    Interval(Interval),
}

/// Hashable identity of an exact scalar, used for cycle detection.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExactKey {
    Rational(BigRational),
    Surd(Surd),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rational(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Scalar::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar::Rational(r)
    }

    /// Builds `rational + coefficient·√radicand`, reducing square factors of
    /// the radicand. Collapses to a rational when the root is exact.
    pub fn surd(rational: BigRational, coefficient: BigRational, radicand: BigInt) -> Result<Self, NumericError> {
        if radicand.is_negative() {
            return Err(NumericError::NegativeSqrt);
        }
        let (outside, inside) = split_square_factor(&radicand);
        let coefficient = coefficient * BigRational::from_integer(outside);
        Ok(Scalar::normalized_surd(rational, coefficient, inside))
    }

    fn normalized_surd(rational: BigRational, coefficient: BigRational, radicand: BigInt) -> Self {
        if coefficient.is_zero() || radicand.is_zero() {
            Scalar::Rational(rational)
        } else if radicand.is_one() {
            Scalar::Rational(rational + coefficient)
        } else {
            Scalar::Surd(Surd {
                rational,
                coefficient,
                radicand,
            })
        }
    }

    /// Interval enclosure `[lo, hi]`, rounded outward to `precision_bits`.
    pub fn enclosure(lo: BigRational, hi: BigRational, precision_bits: u32) -> Self {
        Scalar::Interval(Interval::round_outward(lo, hi, precision_bits))
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Scalar::Interval(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn exact_key(&self) -> Option<ExactKey> {
        match self {
            Scalar::Rational(r) => Some(ExactKey::Rational(r.clone())),
            Scalar::Surd(s) => Some(ExactKey::Surd(s.clone())),
            Scalar::Interval(_) => None,
        }
    }

    /// Certified precision of an interval; `None` for exact values.
    pub fn precision_bits(&self) -> Option<u32> {
        match self {
            Scalar::Interval(i) => Some(i.precision_bits),
            _ => None,
        }
    }

    pub fn to_interval(&self, precision_bits: u32) -> Interval {
        match self {
            Scalar::Rational(r) => Interval::point(r, precision_bits),
            Scalar::Surd(s) => s.enclose(precision_bits),
            Scalar::Interval(i) => i.clone(),
        }
    }

    /// Lower and upper rational bounds (equal for rationals).
    pub fn bounds(&self) -> (BigRational, BigRational) {
        match self {
            Scalar::Rational(r) => (r.clone(), r.clone()),
            Scalar::Surd(s) => {
                let i = s.enclose(DEFAULT_PRECISION_BITS);
                (i.lo, i.hi)
            }
            Scalar::Interval(i) => (i.lo.clone(), i.hi.clone()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Surd(s) => {
                let n = s.radicand.to_f64().unwrap_or(f64::NAN);
                s.rational.to_f64().unwrap_or(f64::NAN) + s.coefficient.to_f64().unwrap_or(f64::NAN) * n.sqrt()
            }
            Scalar::Interval(i) => ((&i.lo + &i.hi) / BigRational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn compare(&self, other: &Scalar) -> Ordering3 {
        compare(self, other)
    }

    pub fn is_zero(&self) -> Option<bool> {
        self.compare(&Scalar::zero()).is_eq()
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, NumericError> {
        if other.is_zero() == Some(true) {
            return Err(NumericError::DivisionByZero);
        }
        Ok(self * &other.recip()?)
    }

    pub fn recip(&self) -> Result<Scalar, NumericError> {
        match self {
            Scalar::Rational(r) => {
                if r.is_zero() {
                    Err(NumericError::DivisionByZero)
                } else {
                    Ok(Scalar::Rational(r.recip()))
                }
            }
            Scalar::Surd(s) => {
                // (a + b√n)^-1 = (a − b√n) / (a² − b²n); nonzero because √n is irrational.
                let norm = &s.rational * &s.rational
                    - &s.coefficient * &s.coefficient * BigRational::from_integer(s.radicand.clone());
                Ok(Scalar::normalized_surd(
                    &s.rational / &norm,
                    -(&s.coefficient / &norm),
                    s.radicand.clone(),
                ))
            }
            Scalar::Interval(i) => Ok(Scalar::Interval(i.recip()?)),
        }
    }

    pub fn abs(&self) -> Scalar {
        match self.compare(&Scalar::zero()) {
            Ordering3::Less => -self,
            Ordering3::Unknown => {
                let i = self.to_interval(DEFAULT_PRECISION_BITS);
                let hi = i.lo.abs().max(i.hi.abs());
                Scalar::enclosure(BigRational::zero(), hi, i.precision_bits)
            }
            _ => self.clone(),
        }
    }

    pub fn min<'a>(&'a self, other: &'a Scalar) -> Scalar {
        match self.compare(other) {
            Ordering3::Less | Ordering3::Equal => self.clone(),
            Ordering3::Greater => other.clone(),
            Ordering3::Unknown => hull(self, other, |a, b| a.min(b)),
        }
    }

    pub fn max<'a>(&'a self, other: &'a Scalar) -> Scalar {
        match self.compare(other) {
            Ordering3::Greater | Ordering3::Equal => self.clone(),
            Ordering3::Less => other.clone(),
            Ordering3::Unknown => hull(self, other, |a, b| a.max(b)),
        }
    }
}

/// Interval of `op` applied endpoint-wise (valid for monotone `min`/`max`).
fn hull(a: &Scalar, b: &Scalar, op: impl Fn(BigRational, BigRational) -> BigRational) -> Scalar {
    let p = working_precision(a, b);
    let ia = a.to_interval(p);
    let ib = b.to_interval(p);
    let lo = op(ia.lo.clone(), ib.lo.clone());
    let hi = op(ia.hi.clone(), ib.hi.clone());
    Scalar::enclosure(lo, hi, p)
}

fn working_precision(a: &Scalar, b: &Scalar) -> u32 {
    match (a.precision_bits(), b.precision_bits()) {
        (Some(x), Some(y)) => x.min(y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => DEFAULT_PRECISION_BITS,
    }
}

/// Three-valued comparison. Exact for rationals and for surds; for intervals
/// decided only when the enclosures are disjoint (or identical points).
pub fn compare(a: &Scalar, b: &Scalar) -> Ordering3 {
    match (a, b) {
        (Scalar::Rational(x), Scalar::Rational(y)) => x.cmp(y).into(),
        (Scalar::Surd(_), _) | (_, Scalar::Surd(_)) if a.is_exact() && b.is_exact() => {
            match a - b {
                Scalar::Rational(r) => r.cmp(&BigRational::zero()).into(),
                Scalar::Surd(s) => s.sign().into(),
                // Different radicands: the difference is an enclosure. Refine
                // until decided; two distinct algebraic values separate eventually,
                // equal ones cannot be certified this way.
                Scalar::Interval(_) => compare_by_refinement(a, b),
            }
        }
        _ => {
            let p = working_precision(a, b);
            a.to_interval(p).compare(&b.to_interval(p))
        }
    }
}

fn compare_by_refinement(a: &Scalar, b: &Scalar) -> Ordering3 {
    let mut p = DEFAULT_PRECISION_BITS;
    while p <= 8 * DEFAULT_PRECISION_BITS {
        let r = a.to_interval(p).compare(&b.to_interval(p));
        if r.is_decided() {
            return r;
        }
        p *= 2;
    }
    Ordering3::Unknown
}

/// Certified enclosure of `√n` whose width meets the `precision_bits` bound.
pub fn sqrt_interval(n: &BigRational, precision_bits: u32) -> Result<Scalar, NumericError> {
    if n.is_negative() {
        return Err(NumericError::NegativeSqrt);
    }
    if precision_bits == 0 {
        return Err(NumericError::ZeroPrecision);
    }
    let (lo, hi) = sqrt_bounds(n, precision_bits);
    Ok(Scalar::Interval(Interval {
        precision_bits: effective_precision(&lo, &hi, precision_bits),
        lo,
        hi,
    }))
}

/// Exact `√n`: a rational when `n` is a rational square, else a surd.
pub fn sqrt_exact(n: &BigRational) -> Result<Scalar, NumericError> {
    if n.is_negative() {
        return Err(NumericError::NegativeSqrt);
    }
    // √(p/q) = √(pq)/q
    let pq = n.numer() * n.denom();
    Scalar::surd(
        BigRational::zero(),
        BigRational::new(BigInt::one(), n.denom().clone()),
        pq,
    )
}

/// Writes `n = outside² · inside` with small square factors pulled out.
fn split_square_factor(n: &BigInt) -> (BigInt, BigInt) {
    if n.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    let mut outside = BigInt::one();
    let mut inside = BigInt::one();
    let mut rest = n.clone();
    let mut p: u64 = 2;
    while p <= TRIAL_DIVISION_LIMIT {
        let bp = BigInt::from(p);
        if &bp * &bp > rest {
            break;
        }
        let mut count = 0u32;
        while rest.is_multiple_of(&bp) {
            rest /= &bp;
            count += 1;
        }
        for _ in 0..count / 2 {
            outside *= &bp;
        }
        if count % 2 == 1 {
            inside *= &bp;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let root = rest.sqrt();
    if &root * &root == rest {
        outside *= root;
    } else {
        inside *= rest;
    }
    (outside, inside)
}

impl Add for &Scalar {
    type Output = Scalar;

    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Rational(r), Scalar::Surd(s)) | (Scalar::Surd(s), Scalar::Rational(r)) => {
                Scalar::normalized_surd(&s.rational + r, s.coefficient.clone(), s.radicand.clone())
            }
            (Scalar::Surd(a), Scalar::Surd(b)) if a.radicand == b.radicand => Scalar::normalized_surd(
                &a.rational + &b.rational,
                &a.coefficient + &b.coefficient,
                a.radicand.clone(),
            ),
            _ => {
                let p = working_precision(self, rhs);
                Scalar::Interval(self.to_interval(p).add(&rhs.to_interval(p)))
            }
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Surd(s) => Scalar::Surd(Surd {
                rational: -&s.rational,
                coefficient: -&s.coefficient,
                radicand: s.radicand.clone(),
            }),
            Scalar::Interval(i) => Scalar::Interval(i.neg()),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;

    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;

    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Rational(r), Scalar::Surd(s)) | (Scalar::Surd(s), Scalar::Rational(r)) => {
                Scalar::normalized_surd(&s.rational * r, &s.coefficient * r, s.radicand.clone())
            }
            (Scalar::Surd(a), Scalar::Surd(b)) if a.radicand == b.radicand => {
                let n = BigRational::from_integer(a.radicand.clone());
                Scalar::normalized_surd(
                    &a.rational * &b.rational + &a.coefficient * &b.coefficient * n,
                    &a.rational * &b.coefficient + &a.coefficient * &b.rational,
                    a.radicand.clone(),
                )
            }
            _ => {
                let p = working_precision(self, rhs);
                Scalar::Interval(self.to_interval(p).mul(&rhs.to_interval(p)))
            }
        }
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::Rational(r)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_integer(n)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write_rational(f, r),
            Scalar::Surd(s) => {
                if !s.rational.is_zero() {
                    write_rational(f, &s.rational)?;
                    f.write_str(if s.coefficient.is_negative() { "-" } else { "+" })?;
                } else if s.coefficient.is_negative() {
                    f.write_str("-")?;
                }
                let c = s.coefficient.abs();
                if !c.is_one() {
                    write_rational(f, &c)?;
                    f.write_str("*")?;
                }
                write!(f, "sqrt({})", s.radicand)
            }
            Scalar::Interval(i) => {
                let digits = decimal_digits_for(i.precision_bits);
                write!(
                    f,
                    "[{}, {}]",
                    decimal_string(&i.lo, digits, Rounding::Down),
                    decimal_string(&i.hi, digits, Rounding::Up)
                )
            }
        }
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, r: &BigRational) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// Number of decimal digits justified by `bits` of binary precision.
pub fn decimal_digits_for(bits: u32) -> usize {
    ((bits as f64) * std::f64::consts::LOG10_2).ceil() as usize + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    Down,
    Up,
}

/// Fixed-point decimal rendering with `digits` fractional digits.
pub fn decimal_string(r: &BigRational, digits: usize, rounding: Rounding) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = r * BigRational::from_integer(scale.clone());
    let n = match rounding {
        Rounding::Down => scaled.floor().to_integer(),
        Rounding::Up => scaled.ceil().to_integer(),
    };
    let negative = n.sign() == Sign::Minus;
    let (int_part, frac_part) = n.abs().div_rem(&scale);
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    out.push_str(&int_part.to_string());
    if digits > 0 {
        let frac = frac_part.to_string();
        out.push('.');
        out.push_str(&"0".repeat(digits - frac.len()));
        out.push_str(&frac);
    }
    out
}

impl FromStr for Scalar {
    type Err = NumericError;

    /// Accepts integers, fractions `p/q`, terminating decimals `1.9`, and
    /// arithmetic over them with `+ - * /`, parentheses and `sqrt(...)` of a
    /// rational, e.g. `(1+sqrt(5))/2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parser = LiteralParser {
            input: s,
            chars: s.char_indices().peekable(),
        };
        let value = parser.expr()?;
        parser.skip_ws();
        if let Some(&(pos, c)) = parser.chars.peek() {
            return Err(parser.error(format!("unexpected {c:?} at offset {pos}")));
        }
        Ok(value)
    }
}

struct LiteralParser<'a> {
    input: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
}

impl LiteralParser<'_> {
    fn error(&self, reason: impl Into<String>) -> NumericError {
        NumericError::Parse {
            input: self.input.to_string(),
            reason: reason.into(),
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some((_, c)) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn eat(&mut self, want: char) -> bool {
        self.skip_ws();
        if matches!(self.chars.peek(), Some(&(_, c)) if c == want) {
            self.chars.next();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Scalar, NumericError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Scalar, NumericError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if self.eat('/') {
                let rhs = self.unary()?;
                acc = acc.checked_div(&rhs)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Scalar, NumericError> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<Scalar, NumericError> {
        self.skip_ws();
        match self.chars.peek().copied() {
            Some((_, '(')) => {
                self.chars.next();
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("missing ')'"));
                }
                Ok(v)
            }
            Some((_, c)) if c.is_ascii_digit() || c == '.' => self.number(),
            Some((_, c)) if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while let Some(&(_, c)) = self.chars.peek() {
                    if !c.is_ascii_alphabetic() {
                        break;
                    }
                    name.push(c);
                    self.chars.next();
                }
                if name != "sqrt" {
                    return Err(self.error(format!("unknown function {name:?}")));
                }
                if !self.eat('(') {
                    return Err(self.error("expected '(' after sqrt"));
                }
                let arg = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("missing ')'"));
                }
                match arg {
                    Scalar::Rational(r) => sqrt_exact(&r),
                    other => Err(NumericError::IrrationalSqrtArgument(other.to_string())),
                }
            }
            Some((pos, c)) => Err(self.error(format!("unexpected {c:?} at offset {pos}"))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Scalar, NumericError> {
        let mut int_digits = String::new();
        let mut frac_digits = String::new();
        let mut seen_point = false;
        while let Some(&(_, c)) = self.chars.peek() {
            if c.is_ascii_digit() {
                if seen_point {
                    frac_digits.push(c);
                } else {
                    int_digits.push(c);
                }
            } else if c == '.' && !seen_point {
                seen_point = true;
            } else {
                break;
            }
            self.chars.next();
        }
        if int_digits.is_empty() && frac_digits.is_empty() {
            return Err(self.error("expected digits"));
        }
        let all = format!("{int_digits}{frac_digits}");
        let numer: BigInt = all.parse().map_err(|_| self.error("bad number"))?;
        let denom = BigInt::from(10u32).pow(frac_digits.len() as u32);
        Ok(Scalar::Rational(BigRational::new(numer, denom)))
    }
}
