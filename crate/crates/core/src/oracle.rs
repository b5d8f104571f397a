//! Brute-force verification on rational systems.
//!
//! Everything here is exact rational arithmetic over explicit digit trees,
//! sharing no digit-selection logic with the expansion engine.

use std::cmp::Ordering;

use num_rational::BigRational;
use rayon::prelude::*;
use thiserror::Error;

use crate::expansion::{expand, ExpansionError, ExpansionKind, Validator};
use crate::numerics::Scalar;
use crate::sequences::Digit;
use crate::system::{AlphabetBaseSystem, RegularSystem, SystemError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("the oracle only handles rational systems and points")]
    NotRational,
    #[error("the system is not semi-regular")]
    NotSemiRegular,
    #[error("{0} lies outside [λ, Λ]")]
    OutOfRange(String),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
}

/// Equal-length digit words stored back to back, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WordList {
    width: usize,
    data: Vec<Digit>,
}

impl WordList {
    fn from_unsorted(width: usize, mut words: Vec<Vec<Digit>>) -> Self {
        words.sort();
        words.dedup();
        WordList {
            width,
            data: words.concat(),
        }
    }

    fn from_sorted_chunks(width: usize, chunks: Vec<Vec<Digit>>) -> Self {
        WordList {
            width,
            data: chunks.concat(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.data
            .len()
            .checked_div(self.width)
            .unwrap_or(usize::from(!self.data.is_empty()))
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Digit]> {
        self.data.chunks(self.width.max(1))
    }

    pub fn get(&self, i: usize) -> Option<&[Digit]> {
        self.iter().nth(i)
    }

    pub fn first(&self) -> Option<&[Digit]> {
        self.iter().next()
    }

    pub fn last(&self) -> Option<&[Digit]> {
        self.iter().last()
    }

    pub fn contains(&self, word: &[Digit]) -> bool {
        if word.len() != self.width {
            return false;
        }
        let n = self.len();
        let (mut lo, mut hi) = (0, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            let w = &self.data[mid * self.width..(mid + 1) * self.width];
            match w.cmp(word) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn to_vecs(&self) -> Vec<Vec<Digit>> {
        self.iter().map(<[Digit]>::to_vec).collect()
    }
}

fn rational(s: &Scalar) -> Result<BigRational, OracleError> {
    s.as_rational().cloned().ok_or(OracleError::NotRational)
}

/// Digit values, bases and bounds of a rational system.
#[derive(Debug, Clone)]
struct Exact {
    d: Vec<BigRational>,
    q: Vec<BigRational>,
    lambda: BigRational,
    big_lambda: BigRational,
}

impl Exact {
    fn new(system: &AlphabetBaseSystem) -> Result<Self, OracleError> {
        let d = system.digit_values().iter().map(rational).collect::<Result<Vec<_>, _>>()?;
        let q = system.bases().iter().map(rational).collect::<Result<Vec<_>, _>>()?;
        let (lambda, big_lambda) = system.bounds();
        Ok(Exact {
            d,
            q,
            lambda: rational(&lambda)?,
            big_lambda: rational(&big_lambda)?,
        })
    }

    fn max(&self) -> usize {
        self.d.len() - 1
    }

    fn step(&self, j: usize, r: &BigRational) -> BigRational {
        &self.q[j] * r - &self.d[j]
    }

    fn inside(&self, r: &BigRational) -> bool {
        &self.lambda <= r && r <= &self.big_lambda
    }

    /// `(d_j + y) / q_j`
    fn window_edge(&self, j: usize, y: &BigRational) -> BigRational {
        (&self.d[j] + y) / &self.q[j]
    }
}

/// All length-`depth` prefixes that some expansion of `x` can start with.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionTree {
    pub x: BigRational,
    pub depth: usize,
    pub surviving_prefixes: WordList,
}

/// Depth-first search over digit words, largest digit first, keeping a word
/// while the remainder `Q·(x − π(word))` stays in `[λ, Λ]`, i.e. while `x`
/// lies in the value range of the word's continuations.
pub fn enumerate_expansions(system: &AlphabetBaseSystem, x: &Scalar, depth: usize) -> Result<ExpansionTree, OracleError> {
    if !system.is_semi_regular()? {
        return Err(OracleError::NotSemiRegular);
    }
    let exact = Exact::new(system)?;
    let x = rational(x)?;
    if !exact.inside(&x) {
        return Err(OracleError::OutOfRange(x.to_string()));
    }
    let mut found = Vec::new();
    let mut word = Vec::with_capacity(depth);
    survive(&exact, &x, depth, &mut word, &mut found);
    Ok(ExpansionTree {
        x,
        depth,
        surviving_prefixes: WordList::from_unsorted(depth, found),
    })
}

fn survive(exact: &Exact, r: &BigRational, depth: usize, word: &mut Vec<Digit>, found: &mut Vec<Vec<Digit>>) {
    if word.len() == depth {
        found.push(word.clone());
        return;
    }
    for j in (0..=exact.max()).rev() {
        let next = exact.step(j, r);
        if exact.inside(&next) {
            word.push(j as Digit);
            survive(exact, &next, depth, word, found);
            word.pop();
        }
    }
}

/// Remainder of `x` after a word, or `None` if the word is not a prefix of any expansion.
fn remainder_after(exact: &Exact, x: &BigRational, word: &[Digit]) -> Option<BigRational> {
    let mut r = x.clone();
    for &j in word {
        r = exact.step(j as usize, &r);
        if !exact.inside(&r) {
            return None;
        }
    }
    Some(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalCheck {
    pub kind: ExpansionKind,
    pub engine: Vec<Digit>,
    pub oracle: Option<Vec<Digit>>,
    pub holds: bool,
}

/// Checks that the engine's expansion prefix is the lexicographic extremum
/// the kind calls for among the surviving prefixes: the largest (greedy),
/// the largest extendable to an infinite expansion (quasi-greedy), the
/// smallest (lazy), or the smallest extendable to a co-infinite one (quasi-lazy).
pub fn verify_extremal(system: &RegularSystem, x: &Scalar, kind: ExpansionKind, depth: usize) -> Result<ExtremalCheck, OracleError> {
    let tree = enumerate_expansions(system.system(), x, depth)?;
    verify_against(system, &tree, kind)
}

/// [`verify_extremal`] against an already enumerated tree.
pub fn verify_against(system: &RegularSystem, tree: &ExpansionTree, kind: ExpansionKind) -> Result<ExtremalCheck, OracleError> {
    let exact = Exact::new(system.system())?;
    let m = exact.max() as Digit;
    let engine = expand(system, &Scalar::from_rational(tree.x.clone()), kind, tree.depth)?
        .digits()
        .to_vec();
    // λ has no expansion but 0^∞, and Λ none but M^∞
    let extendable = |w: &[Digit]| {
        let r = remainder_after(&exact, &tree.x, w).expect("survivor");
        match kind {
            ExpansionKind::QuasiGreedy => r > exact.lambda || w.iter().all(|&d| d == 0),
            ExpansionKind::QuasiLazy => r < exact.big_lambda || w.iter().all(|&d| d == m),
            _ => true,
        }
    };
    let mut candidates = tree.surviving_prefixes.iter().filter(|w| extendable(w));
    let oracle = if kind.is_greedy_side() {
        candidates.last()
    } else {
        candidates.next()
    }
    .map(<[Digit]>::to_vec);
    let holds = oracle.as_deref() == Some(engine.as_slice());
    Ok(ExtremalCheck {
        kind,
        engine,
        oracle,
        holds,
    })
}

/// Length-`depth` words that are not yet refuted as prefixes of unique
/// expansions, computed in two independent ways.
#[derive(Debug, Clone, PartialEq)]
pub struct Census {
    pub depth: usize,
    /// Words whose every tail passes the truncated lexicographic conditions
    /// (below `α^{j_n}` after `j_n < M`, above `γ^{j_n}` after `j_n > 0`; ties pass).
    pub lexicographic: WordList,
    /// Words that begin both some greedy and some lazy expansion, found by
    /// tracking the remainder windows of the two digit-selection rules.
    pub windows: WordList,
}

impl Census {
    pub fn agree(&self) -> bool {
        self.lexicographic == self.windows
    }
}

/// Words of the top levels of the tree, used to split the search for rayon.
fn seeds(max: usize, depth: usize) -> Vec<Vec<Digit>> {
    let mut level = depth.min(3);
    // keep enough seeds for parallelism without exploding large alphabets
    while level > 1 && (max + 1).pow(level as u32) > 4096 {
        level -= 1;
    }
    let mut words = vec![Vec::new()];
    for _ in 0..level {
        words = words
            .into_iter()
            .flat_map(|w| {
                (0..=max as Digit).map(move |j| {
                    let mut v = w.clone();
                    v.push(j);
                    v
                })
            })
            .collect();
    }
    words
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    // true: must stay below α^j; false: must stay above γ^j
    below: bool,
    j: usize,
    matched: usize,
}

struct LexContext {
    max: usize,
    alphas: Vec<Vec<Digit>>,
    gammas: Vec<Vec<Digit>>,
}

impl LexContext {
    /// Appends `c`, returning the new pending ties or `None` if refuted.
    fn push(&self, pending: &[Pending], c: Digit) -> Option<Vec<Pending>> {
        let mut next = Vec::with_capacity(pending.len() + 2);
        for p in pending {
            let reference = if p.below { &self.alphas[p.j] } else { &self.gammas[p.j] };
            let target = reference[p.matched];
            match (c.cmp(&target), p.below) {
                (Ordering::Equal, _) => next.push(Pending {
                    matched: p.matched + 1,
                    ..*p
                }),
                (Ordering::Greater, true) | (Ordering::Less, false) => return None,
                _ => {}
            }
        }
        let c = c as usize;
        if c < self.max {
            next.push(Pending {
                below: true,
                j: c,
                matched: 0,
            });
        }
        if c > 0 {
            next.push(Pending {
                below: false,
                j: c,
                matched: 0,
            });
        }
        Some(next)
    }

    fn dfs(&self, word: &mut Vec<Digit>, pending: &[Pending], depth: usize, out: &mut Vec<Digit>) {
        if word.len() == depth {
            out.extend_from_slice(word);
            return;
        }
        for c in 0..=self.max as Digit {
            if let Some(next) = self.push(pending, c) {
                word.push(c);
                self.dfs(word, &next, depth, out);
                word.pop();
            }
        }
    }

    fn run(&self, seed: &[Digit], depth: usize) -> Vec<Digit> {
        let mut pending = Vec::new();
        for &c in seed {
            match self.push(&pending, c) {
                Some(next) => pending = next,
                None => return Vec::new(),
            }
        }
        let mut out = Vec::new();
        let mut word = seed.to_vec();
        self.dfs(&mut word, &pending, depth, &mut out);
        out
    }
}

/// An interval of remainders with open or closed ends.
#[derive(Debug, Clone, PartialEq)]
struct Window {
    lo: BigRational,
    lo_closed: bool,
    hi: BigRational,
    hi_closed: bool,
}

impl Window {
    fn closed(lo: BigRational, hi: BigRational) -> Self {
        Window {
            lo,
            lo_closed: true,
            hi,
            hi_closed: true,
        }
    }

    fn is_empty(&self) -> bool {
        match self.lo.cmp(&self.hi) {
            Ordering::Less => false,
            Ordering::Equal => !(self.lo_closed && self.hi_closed),
            Ordering::Greater => true,
        }
    }

    fn intersect(&self, other: &Window) -> Window {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Less => (other.lo.clone(), other.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (other.hi.clone(), other.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        Window {
            lo,
            lo_closed,
            hi,
            hi_closed,
        }
    }

    /// Image under the increasing map `y ↦ q·y − d`.
    fn step(&self, exact: &Exact, j: usize) -> Window {
        Window {
            lo: exact.step(j, &self.lo),
            lo_closed: self.lo_closed,
            hi: exact.step(j, &self.hi),
            hi_closed: self.hi_closed,
        }
    }
}

struct WindowContext {
    exact: Exact,
    // points whose greedy / lazy expansion starts with digit j
    greedy: Vec<Window>,
    lazy: Vec<Window>,
}

impl WindowContext {
    fn new(exact: Exact) -> Self {
        let m = exact.max();
        let t: Vec<BigRational> = (0..=m).map(|j| exact.window_edge(j, &exact.lambda)).collect();
        let s: Vec<BigRational> = (0..=m).map(|j| exact.window_edge(j, &exact.big_lambda)).collect();
        let greedy = (0..=m)
            .map(|j| {
                if j < m {
                    Window {
                        lo: t[j].clone(),
                        lo_closed: true,
                        hi: t[j + 1].clone(),
                        hi_closed: false,
                    }
                } else {
                    Window::closed(t[m].clone(), exact.big_lambda.clone())
                }
            })
            .collect();
        let lazy = (0..=m)
            .map(|j| {
                if j > 0 {
                    Window {
                        lo: s[j - 1].clone(),
                        lo_closed: false,
                        hi: s[j].clone(),
                        hi_closed: true,
                    }
                } else {
                    Window::closed(exact.lambda.clone(), s[0].clone())
                }
            })
            .collect();
        WindowContext { exact, greedy, lazy }
    }

    fn start(&self) -> Window {
        Window::closed(self.exact.lambda.clone(), self.exact.big_lambda.clone())
    }

    /// Separate greedy and lazy remainder sets after digit `j`.
    fn push_pair(&self, state: &(Window, Window), j: usize) -> Option<(Window, Window)> {
        let g = state.0.intersect(&self.greedy[j]);
        let l = state.1.intersect(&self.lazy[j]);
        if g.is_empty() || l.is_empty() {
            return None;
        }
        Some((g.step(&self.exact, j), l.step(&self.exact, j)))
    }

    /// Points whose greedy and lazy expansions both start with the word.
    fn push_joint(&self, state: &Window, j: usize) -> Option<Window> {
        let w = state.intersect(&self.greedy[j]).intersect(&self.lazy[j]);
        if w.is_empty() {
            return None;
        }
        Some(w.step(&self.exact, j))
    }

    fn run<S, F>(&self, seed: &[Digit], depth: usize, start: S, push: &F) -> Vec<Digit>
    where
        F: Fn(&Self, &S, usize) -> Option<S>,
    {
        let mut state = start;
        for &c in seed {
            match push(self, &state, c as usize) {
                Some(next) => state = next,
                None => return Vec::new(),
            }
        }
        let mut out = Vec::new();
        let mut word = seed.to_vec();
        self.dfs(&mut word, &state, depth, push, &mut out);
        out
    }

    fn dfs<S, F>(&self, word: &mut Vec<Digit>, state: &S, depth: usize, push: &F, out: &mut Vec<Digit>)
    where
        F: Fn(&Self, &S, usize) -> Option<S>,
    {
        if word.len() == depth {
            out.extend_from_slice(word);
            return;
        }
        for j in 0..=self.exact.max() {
            if let Some(next) = push(self, state, j) {
                word.push(j as Digit);
                self.dfs(word, &next, depth, push, out);
                word.pop();
            }
        }
    }
}

fn parallel_words<F>(max: usize, depth: usize, run: F) -> WordList
where
    F: Fn(&[Digit]) -> Vec<Digit> + Sync,
{
    let chunks: Vec<Vec<Digit>> = seeds(max, depth).par_iter().map(|seed| run(seed)).collect();
    WordList::from_sorted_chunks(depth, chunks)
}

/// The census of not-yet-refuted unique-expansion prefixes of length `depth`.
pub fn census_unique(system: &RegularSystem, depth: usize) -> Result<Census, OracleError> {
    let exact = Exact::new(system.system())?;
    let max = exact.max();
    let validator = Validator::new(system, depth)?;
    let lex = LexContext {
        max,
        alphas: (0..max).map(|j| validator.alpha(j).take(depth)).collect(),
        gammas: (0..=max)
            .map(|j| if j == 0 { Vec::new() } else { validator.gamma(j).take(depth) })
            .collect(),
    };
    let lexicographic = parallel_words(max, depth, |seed| lex.run(seed, depth));
    let ctx = WindowContext::new(exact);
    let windows = parallel_words(max, depth, |seed| {
        ctx.run(seed, depth, (ctx.start(), ctx.start()), &WindowContext::push_pair)
    });
    Ok(Census {
        depth,
        lexicographic,
        windows,
    })
}

/// Words of length `depth` that begin the greedy and the lazy expansion of
/// one and the same point. Every unique expansion contributes its prefix.
pub fn joint_census(system: &RegularSystem, depth: usize) -> Result<WordList, OracleError> {
    let ctx = WindowContext::new(Exact::new(system.system())?);
    let max = ctx.exact.max();
    Ok(parallel_words(max, depth, |seed| {
        ctx.run(seed, depth, ctx.start(), &WindowContext::push_joint)
    }))
}

/// A point whose greedy and lazy expansions both start with `word`, if any.
pub fn joint_witness(system: &RegularSystem, word: &[Digit]) -> Result<Option<BigRational>, OracleError> {
    let exact = Exact::new(system.system())?;
    let ctx = WindowContext::new(exact);
    // pull the admissible remainder set back through the word
    let mut state = ctx.start();
    let mut maps = Vec::new();
    for &j in word {
        match ctx.push_joint(&state, j as usize) {
            Some(next) => {
                maps.push(j as usize);
                state = next;
            }
            None => return Ok(None),
        }
    }
    let two = BigRational::from_integer(2.into());
    let mut y = if state.lo == state.hi {
        state.lo.clone()
    } else {
        (&state.lo + &state.hi) / &two
    };
    for &j in maps.iter().rev() {
        y = (&y + &ctx.exact.d[j]) / &ctx.exact.q[j];
    }
    Ok(Some(y))
}
