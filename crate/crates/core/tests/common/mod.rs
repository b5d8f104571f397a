#![allow(dead_code)]

use alphabase::numerics::Scalar;
use alphabase::sequences::{Digit, DigitSequence};
use alphabase::system::{AlphabetBaseSystem, RegularSystem};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::Rng;

pub fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn exact(r: &BigRational) -> Scalar {
    Scalar::from_rational(r.clone())
}

pub fn rational(s: &Scalar) -> BigRational {
    s.as_rational().cloned().expect("rational scalar")
}

pub fn system(pairs: &[(BigRational, BigRational)]) -> AlphabetBaseSystem {
    let (d, b): (Vec<_>, Vec<_>) = pairs.iter().map(|(d, b)| (exact(d), exact(b))).unzip();
    AlphabetBaseSystem::new(d, b).unwrap()
}

pub fn parsed(pairs: &[(&str, &str)]) -> RegularSystem {
    RegularSystem::new(AlphabetBaseSystem::parse_pairs(pairs).unwrap()).unwrap()
}

pub fn two_element(d0: BigRational, q0: BigRational, d1: BigRational, q1: BigRational) -> AlphabetBaseSystem {
    system(&[(d0, q0), (d1, q1)])
}

/// Rational systems used where a fixed, varied sample is wanted.
pub fn sample_systems() -> Vec<RegularSystem> {
    [
        &[("0", "2"), ("1", "2")][..],
        &[("0", "3/2"), ("1", "9/5")],
        &[("-1", "9/5"), ("0", "3/2")],
        &[("0", "19/10"), ("1", "19/10")],
        &[("0", "8/5"), ("1", "7/4")],
        &[("-1/2", "17/10"), ("1", "3/2")],
        &[("0", "19/10"), ("1", "19/10"), ("2", "19/10")],
        &[("0", "5/2"), ("1", "5/2"), ("2", "5/2")],
        &[("-1", "5/2"), ("0", "2"), ("1", "9/4")],
        &[("0", "3"), ("1", "3"), ("2", "3"), ("3", "3")],
    ]
    .iter()
    .map(|pairs| parsed(pairs))
    .collect()
}

/// A random rational in `[lo, hi]` with denominator below `den`.
pub fn random_between(rng: &mut StdRng, lo: &BigRational, hi: &BigRational, den: i64) -> BigRational {
    let d = rng.gen_range(1..den);
    let n = rng.gen_range(0..=d);
    lo + (hi - lo) * q(n, d)
}

/// A random regular rational system with up to `max_digits` digits.
pub fn random_regular(rng: &mut StdRng, max_digits: usize) -> RegularSystem {
    loop {
        let len = rng.gen_range(2..=max_digits);
        let mut d = q(rng.gen_range(-4..=2), 2);
        let mut pairs = Vec::new();
        for _ in 0..len {
            let base = q(rng.gen_range(11..=(10 * len as i64 + 10)), 10);
            pairs.push((d.clone(), base));
            d += q(rng.gen_range(1..=6), 4);
        }
        if let Ok(r) = RegularSystem::new(system(&pairs)) {
            return r;
        }
    }
}

pub fn random_sequence(rng: &mut StdRng, max: Digit) -> DigitSequence {
    let pre: Vec<Digit> = (0..rng.gen_range(0..5)).map(|_| rng.gen_range(0..=max)).collect();
    let block: Vec<Digit> = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(0..=max)).collect();
    DigitSequence::periodic(pre, block)
}

/// All words of length `n` over `0..=max`, in lexicographic order.
pub fn all_words(max: Digit, n: usize) -> Vec<Vec<Digit>> {
    let mut words = vec![Vec::new()];
    for _ in 0..n {
        words = words
            .into_iter()
            .flat_map(|w| {
                (0..=max).map(move |j| {
                    let mut v = w.clone();
                    v.push(j);
                    v
                })
            })
            .collect();
    }
    words
}
