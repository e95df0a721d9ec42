//! Affine contractions on the line, words, cylinder intervals and the
//! attractor hull.
//!
//! Composition follows `φ_{i1 i2 … in} = φ_{i1} ∘ φ_{i2} ∘ … ∘ φ_{in}`, so the
//! leftmost symbol is applied last. For a word `w` the composed map is
//! `x ↦ R_w x + C_w` with `R_{wj} = R_w r_j` and `C_{wj} = C_w + R_w c_j`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebraic::AlgebraicError;
use crate::scalar::{Approx, Scalar, Tolerance};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IfsError {
    #[error("a system needs at least one map")]
    EmptySystem,
    #[error("composition of the empty word is not defined here")]
    EmptyWord,
    #[error("map {index} has ratio {ratio}, need 0 < |ratio| < 1")]
    BadRatio { index: usize, ratio: String },
    #[error("symbol {symbol} is outside the alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: u32, alphabet: usize },
    #[error("point bracket is not contained in the attractor hull")]
    BracketOutsideHull,
    #[error("no invariant interval found for the system")]
    NoInvariantInterval,
    #[error(transparent)]
    Algebraic(#[from] AlgebraicError),
}

/// A finite sequence of symbols `0..m`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(pub Vec<u32>);

impl Word {
    pub fn new(symbols: Vec<u32>) -> Self {
        Self(symbols)
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn symbols(&self) -> &[u32] {
        &self.0
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn extended(&self, tail: &[u32]) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(tail);
        Word(v)
    }

    /// All words of length `n` over `m` symbols, in lexicographic order.
    pub fn all(m: usize, n: usize) -> impl Iterator<Item = Word> {
        let total = (m as u64).pow(n as u32);
        (0..total).map(move |mut idx| {
            let mut v = vec![0u32; n];
            for slot in v.iter_mut().rev() {
                *slot = (idx % m as u64) as u32;
                idx /= m as u64;
            }
            Word(v)
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

/// Closed interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval<S> {
    pub lo: S,
    pub hi: S,
}

/// How a cylinder sits relative to a point bracket.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Disjoint,
    Contains,
    /// Meets the bracket without containing it.
    Partial,
}

impl<S: Scalar> Interval<S> {
    pub fn new(lo: S, hi: S) -> Self {
        Self { lo, hi }
    }

    pub fn length(&self) -> S {
        self.hi.sub(&self.lo)
    }

    /// Closed containment of `other`.
    pub fn contains(&self, other: &Interval<S>) -> bool {
        self.lo.compare(&other.lo) != Ordering::Greater && other.hi.compare(&self.hi) != Ordering::Greater
    }

    pub fn contains_point(&self, x: &S) -> bool {
        self.lo.compare(x) != Ordering::Greater && x.compare(&self.hi) != Ordering::Greater
    }

    /// Closed intersection, `None` if disjoint.
    pub fn intersection(&self, other: &Interval<S>) -> Option<Interval<S>> {
        let lo = self.lo.max_of(&other.lo);
        let hi = self.hi.min_of(&other.hi);
        (lo.compare(&hi) != Ordering::Greater).then(|| Interval::new(lo, hi))
    }

    pub fn relation_to(&self, bracket: &Interval<S>) -> Relation {
        if self.hi.compare(&bracket.lo) == Ordering::Less || self.lo.compare(&bracket.hi) == Ordering::Greater {
            Relation::Disjoint
        } else if self.contains(bracket) {
            Relation::Contains
        } else {
            Relation::Partial
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.lo.to_f64(), self.hi.to_f64())
    }
}

impl<S: Scalar> fmt::Display for Interval<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// `x ↦ ratio * x + offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineContraction<S> {
    pub ratio: S,
    pub offset: S,
}

impl<S: Scalar> AffineContraction<S> {
    pub fn new(ratio: S, offset: S) -> Self {
        Self { ratio, offset }
    }

    pub fn apply(&self, x: &S) -> S {
        self.ratio.mul(x).add(&self.offset)
    }

    /// `self ∘ inner`.
    pub fn then_inner(&self, inner: &AffineContraction<S>) -> AffineContraction<S> {
        AffineContraction {
            ratio: self.ratio.mul(&inner.ratio),
            offset: self.offset.add(&self.ratio.mul(&inner.offset)),
        }
    }

    pub fn apply_interval(&self, iv: &Interval<S>) -> Interval<S> {
        let a = self.apply(&iv.lo);
        let b = self.apply(&iv.hi);
        if self.ratio.signum() == Ordering::Less {
            Interval::new(b, a)
        } else {
            Interval::new(a, b)
        }
    }

    /// Exact equality of both coefficients.
    pub fn same_map(&self, other: &Self) -> bool {
        self.ratio.compare(&other.ratio) == Ordering::Equal && self.offset.compare(&other.offset) == Ordering::Equal
    }
}

/// Float view of a map, used by the pruned tree search.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ApproxMap {
    pub ratio: Approx,
    pub offset: Approx,
    pub negative: bool,
}

/// A finite list of affine contractions with its attractor hull.
#[derive(Clone, Debug)]
pub struct AffineSystem<S> {
    maps: Vec<AffineContraction<S>>,
    hull: Interval<S>,
    approx_maps: Vec<ApproxMap>,
    approx_hull: (Approx, Approx),
    tolerance: Tolerance,
}

impl<S: Scalar> AffineSystem<S> {
    pub fn new(maps: Vec<AffineContraction<S>>) -> Result<Self, IfsError> {
        let hull = attractor_hull(&maps)?;
        Ok(Self::with_hull(maps, hull))
    }

    fn with_hull(maps: Vec<AffineContraction<S>>, hull: Interval<S>) -> Self {
        let approx_maps = maps
            .iter()
            .map(|f| ApproxMap {
                ratio: f.ratio.approx(),
                offset: f.offset.approx(),
                negative: f.ratio.signum() == Ordering::Less,
            })
            .collect();
        let approx_hull = (hull.lo.approx(), hull.hi.approx());
        let tolerance = maps[0].ratio.tolerance();
        Self { maps, hull, approx_maps, approx_hull, tolerance }
    }

    /// `{λx − 1, λx + 1}`.
    pub fn bernoulli_convolution(lambda: S) -> Result<Self, IfsError> {
        let one = lambda.one_like();
        Self::new(vec![
            AffineContraction::new(lambda.clone(), one.neg()),
            AffineContraction::new(lambda, one),
        ])
    }

    pub fn maps(&self) -> &[AffineContraction<S>] {
        &self.maps
    }

    pub fn alphabet_size(&self) -> usize {
        self.maps.len()
    }

    pub fn hull(&self) -> &Interval<S> {
        &self.hull
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tolerance
    }

    pub fn is_exact(&self) -> bool {
        self.tolerance == Tolerance::Certified
    }

    pub(crate) fn approx_maps(&self) -> &[ApproxMap] {
        &self.approx_maps
    }

    pub(crate) fn approx_hull(&self) -> (Approx, Approx) {
        self.approx_hull
    }

    /// Whether every map has the same ratio (exact compare).
    pub fn constant_ratio(&self) -> Option<&S> {
        let r = &self.maps[0].ratio;
        self.maps[1..]
            .iter()
            .all(|f| f.ratio.compare(r) == Ordering::Equal)
            .then_some(r)
    }

    /// Largest `|ratio|` as a float.
    pub fn max_abs_ratio(&self) -> f64 {
        self.approx_maps.iter().map(|m| m.ratio.mid.abs()).fold(0.0, f64::max)
    }

    pub fn check_word(&self, w: &Word) -> Result<(), IfsError> {
        let m = self.maps.len();
        match w.0.iter().find(|&&s| s as usize >= m) {
            Some(&symbol) => Err(IfsError::SymbolOutOfRange { symbol, alphabet: m }),
            None => Ok(()),
        }
    }

    /// Exact composed map `φ_{w1} ∘ … ∘ φ_{wn}`.
    pub fn compose(&self, w: &Word) -> Result<AffineContraction<S>, IfsError> {
        self.check_word(w)?;
        let (first, rest) = w.0.split_first().ok_or(IfsError::EmptyWord)?;
        let mut acc = self.maps[*first as usize].clone();
        for &s in rest {
            acc = acc.then_inner(&self.maps[s as usize]);
        }
        Ok(acc)
    }

    /// `φ_w(hull)`.
    pub fn cylinder_interval(&self, w: &Word) -> Result<Interval<S>, IfsError> {
        Ok(self.compose(w)?.apply_interval(&self.hull))
    }

    /// Bracket around `π(ω)` for every infinite extension `ω` of `prefix`: the
    /// prefix cylinder, whose width bounds the truncation error.
    pub fn project_point(&self, prefix: &Word) -> Result<Interval<S>, IfsError> {
        self.cylinder_interval(prefix)
    }

    /// The level-`p` system whose alphabet is all `p`-words (lexicographic),
    /// sharing this system's hull.
    pub fn iterate(&self, p: usize) -> Result<AffineSystem<S>, IfsError> {
        if p == 0 {
            return Err(IfsError::EmptyWord);
        }
        let maps = Word::all(self.maps.len(), p)
            .map(|w| self.compose(&w))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::with_hull(maps, self.hull.clone()))
    }
}

/// Smallest interval mapped into itself by every map: the convex hull of the
/// attractor.
///
/// Each endpoint is the fixed point of some extremal map's endpoint equation
/// (with negative ratios swapping endpoints), so every pair of candidate
/// equations is solved exactly and the shortest invariant solution returned.
pub fn attractor_hull<S: Scalar>(maps: &[AffineContraction<S>]) -> Result<Interval<S>, IfsError> {
    let first = maps.first().ok_or(IfsError::EmptySystem)?;
    let one = first.ratio.one_like();
    for (index, f) in maps.iter().enumerate() {
        let r = f.ratio.abs();
        if f.ratio.signum() == Ordering::Equal || r.compare(&one) != Ordering::Less {
            return Err(IfsError::BadRatio { index, ratio: f.ratio.to_string() });
        }
    }
    let mut best: Option<Interval<S>> = None;
    for fi in maps {
        for fj in maps {
            let Some(candidate) = solve_endpoints(fi, fj, &one)? else {
                continue;
            };
            if candidate.lo.compare(&candidate.hi) == Ordering::Greater {
                continue;
            }
            if !maps.iter().all(|f| candidate.contains(&f.apply_interval(&candidate))) {
                continue;
            }
            let shorter = best
                .as_ref()
                .is_none_or(|b| candidate.length().compare(&b.length()) == Ordering::Less);
            if shorter {
                best = Some(candidate);
            }
        }
    }
    best.ok_or(IfsError::NoInvariantInterval)
}

// Left endpoint fixed by `fi`, right endpoint fixed by `fj`.
fn solve_endpoints<S: Scalar>(
    fi: &AffineContraction<S>,
    fj: &AffineContraction<S>,
    one: &S,
) -> Result<Option<Interval<S>>, IfsError> {
    let (ri, ci, rj, cj) = (&fi.ratio, &fi.offset, &fj.ratio, &fj.offset);
    let neg_i = ri.signum() == Ordering::Less;
    let neg_j = rj.signum() == Ordering::Less;
    let fixed = |r: &S, c: &S| -> Result<S, IfsError> { Ok(c.mul(&one.sub(r).inv()?)) };
    let (a, b) = match (neg_i, neg_j) {
        (false, false) => (fixed(ri, ci)?, fixed(rj, cj)?),
        (true, false) => {
            let b = fixed(rj, cj)?;
            (ri.mul(&b).add(ci), b)
        }
        (false, true) => {
            let a = fixed(ri, ci)?;
            let b = rj.mul(&a).add(cj);
            (a, b)
        }
        (true, true) => {
            let denom = one.sub(&ri.mul(rj));
            let a = ri.mul(cj).add(ci).mul(&denom.inv()?);
            let b = rj.mul(&a).add(cj);
            (a, b)
        }
    };
    Ok(Some(Interval::new(a, b)))
}
