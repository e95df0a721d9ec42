//! Pruned depth-first search for the depth-`n` words whose cylinder covers a
//! point bracket.
//!
//! Nodes carry float approximations of the composed map with a running
//! rounding-error bound. Order decisions that the bound cannot certify are
//! redone in exact arithmetic on the node's word, so the result matches exact
//! enumeration.

use std::cmp::Ordering;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ifs::{AffineSystem, ApproxMap, IfsError, Interval, Relation, Word};
use crate::measures::{entropy, BernoulliWeights};
use crate::scalar::{Approx, Scalar, Tolerance};

/// Covering-word count for one point bracket at one depth.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverCount {
    pub depth: usize,
    /// Words whose cylinder contains the bracket (inclusive of ambiguous ones).
    pub beta: u64,
    /// Words counted in `beta` whose potential average is within `tau` of
    /// `∫ψ dμ_p`.
    pub filtered: u64,
    #[serde(serialize_with = "crate::overlap::estimate::serialize_tau")]
    pub tau: f64,
    /// Some cylinder meets the bracket without containing it.
    pub ambiguous: bool,
    /// Tree nodes examined at this depth.
    pub visits: u64,
}

pub fn count_covering_words<S: Scalar>(
    system: &AffineSystem<S>,
    bracket: &Interval<S>,
    n: usize,
    weights: &BernoulliWeights,
    tau: f64,
) -> Result<CoverCount> {
    Ok(count_covering_words_at(system, bracket, &[n], weights, tau)?.remove(0))
}

/// Counts at several depths in a single descent. `depths` must be positive;
/// the result follows the order given.
pub fn count_covering_words_at<S: Scalar>(
    system: &AffineSystem<S>,
    bracket: &Interval<S>,
    depths: &[usize],
    weights: &BernoulliWeights,
    tau: f64,
) -> Result<Vec<CoverCount>> {
    weights.check_alphabet(system.alphabet_size())?;
    if depths.is_empty() || depths.contains(&0) {
        return Err(Error::Contract("depths must be non-empty and positive".into()));
    }
    if tau.is_nan() || tau <= 0.0 {
        return Err(Error::Contract(format!("tau must be positive or infinite, got {tau}")));
    }
    if !system.hull().contains(bracket) {
        return Err(IfsError::BracketOutsideHull.into());
    }
    let approx = (bracket.lo.approx(), bracket.hi.approx());
    Ok(run(system, Bracket::Given(bracket), approx, depths, weights, tau))
}

/// Counts for the point of a sampled symbol sequence, bracketed by the
/// sequence's cylinder. The exact bracket is only built if a float decision
/// is inconclusive.
pub(crate) fn count_for_word<S: Scalar>(
    system: &AffineSystem<S>,
    word: &[u32],
    depths: &[usize],
    weights: &BernoulliWeights,
    tau: f64,
) -> Vec<CoverCount> {
    let maps = system.approx_maps();
    let node = word.iter().fold(Node::ROOT, |node, &s| node.child(&maps[s as usize], 0.0));
    let approx = node.cylinder(system.approx_hull());
    run(system, Bracket::Lazy { word, exact: OnceLock::new() }, approx, depths, weights, tau)
}

fn run<S: Scalar>(
    system: &AffineSystem<S>,
    bracket: Bracket<'_, S>,
    bracket_approx: (Approx, Approx),
    depths: &[usize],
    weights: &BernoulliWeights,
    tau: f64,
) -> Vec<CoverCount> {
    let max_depth = *depths.iter().max().unwrap();
    let mut slots = vec![None; max_depth + 1];
    for (i, &d) in depths.iter().enumerate() {
        slots[d] = Some(i);
    }
    let filter = (!weights.is_uniform() && tau.is_finite()).then(|| Filter {
        log_p: weights.potential(),
        target: -entropy(weights),
        tau,
    });
    let mut search = Search {
        system,
        maps: system.approx_maps(),
        hull: system.approx_hull(),
        tol: system.tolerance(),
        bracket,
        bracket_approx,
        max_depth,
        slots,
        filter,
        path: Vec::with_capacity(max_depth),
        counts: depths
            .iter()
            .map(|&depth| CoverCount { depth, beta: 0, filtered: 0, tau, ambiguous: false, visits: 0 })
            .collect(),
    };
    search.descend(&Node::ROOT, 0);
    search.counts
}

enum Bracket<'a, S> {
    Given(&'a Interval<S>),
    Lazy { word: &'a [u32], exact: OnceLock<Interval<S>> },
}

impl<S: Scalar> Bracket<'_, S> {
    fn exact(&self, system: &AffineSystem<S>) -> &Interval<S> {
        match self {
            Bracket::Given(b) => b,
            Bracket::Lazy { word, exact } => exact.get_or_init(|| {
                system
                    .project_point(&Word(word.to_vec()))
                    .expect("sampled symbols are in range")
            }),
        }
    }
}

struct Filter {
    log_p: Vec<f64>,
    target: f64,
    tau: f64,
}

#[derive(Clone, Copy)]
struct Node {
    ratio: f64,
    ratio_err: f64,
    offset: f64,
    offset_err: f64,
    negative: bool,
    log_p: f64,
}

const U: f64 = f64::EPSILON;

#[inline]
fn product(a: f64, ea: f64, b: f64, eb: f64) -> (f64, f64) {
    let v = a * b;
    (v, a.abs() * eb + ea * b.abs() + ea * eb + v.abs() * U)
}

impl Node {
    const ROOT: Node = Node { ratio: 1.0, ratio_err: 0.0, offset: 0.0, offset_err: 0.0, negative: false, log_p: 0.0 };

    #[inline]
    fn child(&self, f: &ApproxMap, log_p: f64) -> Node {
        let (ratio, ratio_err) = product(self.ratio, self.ratio_err, f.ratio.mid, f.ratio.err);
        let (t, t_err) = product(self.ratio, self.ratio_err, f.offset.mid, f.offset.err);
        let offset = self.offset + t;
        Node {
            ratio,
            ratio_err,
            offset,
            offset_err: self.offset_err + t_err + offset.abs() * U,
            negative: self.negative ^ f.negative,
            log_p: self.log_p + log_p,
        }
    }

    #[inline]
    fn image(&self, h: Approx) -> Approx {
        let (t, t_err) = product(self.ratio, self.ratio_err, h.mid, h.err);
        let mid = self.offset + t;
        Approx { mid, err: self.offset_err + t_err + mid.abs() * U }
    }

    #[inline]
    fn cylinder(&self, hull: (Approx, Approx)) -> (Approx, Approx) {
        let (a, b) = (self.image(hull.0), self.image(hull.1));
        if self.negative {
            (b, a)
        } else {
            (a, b)
        }
    }
}

struct Search<'a, S: Scalar> {
    system: &'a AffineSystem<S>,
    maps: &'a [ApproxMap],
    hull: (Approx, Approx),
    tol: Tolerance,
    bracket: Bracket<'a, S>,
    bracket_approx: (Approx, Approx),
    max_depth: usize,
    slots: Vec<Option<usize>>,
    filter: Option<Filter>,
    path: Vec<u32>,
    counts: Vec<CoverCount>,
}

impl<S: Scalar> Search<'_, S> {
    fn descend(&mut self, node: &Node, depth: usize) {
        let child_depth = depth + 1;
        for j in 0..self.maps.len() {
            let log_p = self.filter.as_ref().map_or(0.0, |f| f.log_p[j]);
            let child = node.child(&self.maps[j], log_p);
            self.path.push(j as u32);
            let relation = self.classify(&child);
            if let Some(slot) = self.slots[child_depth] {
                self.counts[slot].visits += 1;
            }
            if relation != Relation::Disjoint {
                if let Some(slot) = self.slots[child_depth] {
                    self.record(slot, relation, &child, child_depth);
                }
                if child_depth < self.max_depth {
                    self.descend(&child, child_depth);
                }
            }
            self.path.pop();
        }
    }

    fn record(&mut self, slot: usize, relation: Relation, node: &Node, depth: usize) {
        let passes = match &self.filter {
            None => true,
            Some(f) => (node.log_p / depth as f64 - f.target).abs() < f.tau,
        };
        let c = &mut self.counts[slot];
        c.beta += 1;
        if passes {
            c.filtered += 1;
        }
        if relation == Relation::Partial {
            c.ambiguous = true;
        }
    }

    fn classify(&self, node: &Node) -> Relation {
        let (lo, hi) = node.cylinder(self.hull);
        classify_approx(self.tol, lo, hi, self.bracket_approx).unwrap_or_else(|| self.classify_exact())
    }

    fn classify_exact(&self) -> Relation {
        let word = Word(self.path.clone());
        self.system
            .cylinder_interval(&word)
            .expect("path symbols are in range")
            .relation_to(self.bracket.exact(self.system))
    }
}

#[inline]
fn classify_approx(tol: Tolerance, lo: Approx, hi: Approx, bracket: (Approx, Approx)) -> Option<Relation> {
    let (blo, bhi) = bracket;
    let below = tol.decide(hi, blo);
    let above = tol.decide(lo, bhi);
    if below == Some(Ordering::Less) || above == Some(Ordering::Greater) {
        return Some(Relation::Disjoint);
    }
    below?;
    above?;
    let left = tol.decide(lo, blo)?;
    let right = tol.decide(bhi, hi)?;
    Some(if left != Ordering::Greater && right != Ordering::Greater {
        Relation::Contains
    } else {
        Relation::Partial
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::{AlgebraicParameter, RingElement};
    use crate::measures::sample_words;
    use crate::scalar::FloatScalar;

    fn brute<S: Scalar>(system: &AffineSystem<S>, bracket: &Interval<S>, n: usize) -> (u64, bool) {
        let mut beta = 0;
        let mut ambiguous = false;
        for w in Word::all(system.alphabet_size(), n) {
            match system.cylinder_interval(&w).unwrap().relation_to(bracket) {
                Relation::Disjoint => {}
                Relation::Contains => beta += 1,
                Relation::Partial => {
                    beta += 1;
                    ambiguous = true;
                }
            }
        }
        (beta, ambiguous)
    }

    fn garsia() -> AffineSystem<RingElement> {
        let p = AlgebraicParameter::from_strs(&[-1, 0, 2], "1/2", "1").unwrap();
        AffineSystem::bernoulli_convolution(p.generator()).unwrap()
    }

    #[test]
    fn osc_counts_are_one() {
        let p = AlgebraicParameter::from_strs(&[-2, 5], "0", "1").unwrap();
        let sys = AffineSystem::bernoulli_convolution(p.generator()).unwrap();
        let w = BernoulliWeights::uniform(2);
        for o in sample_words(&sys, &w, 12, 50, 3).unwrap() {
            let c = count_covering_words(&sys, &o.point_interval, 12, &w, f64::INFINITY).unwrap();
            assert_eq!((c.beta, c.filtered, c.ambiguous), (1, 1, false));
        }
    }

    #[test]
    fn matches_brute_force_exact() {
        let sys = garsia();
        let w = BernoulliWeights::uniform(2);
        for o in sample_words(&sys, &w, 10, 20, 1).unwrap() {
            let c = count_covering_words(&sys, &o.point_interval, 10, &w, f64::INFINITY).unwrap();
            assert_eq!((c.beta, c.ambiguous), brute(&sys, &o.point_interval, 10));
        }
    }

    #[test]
    fn exact_endpoint_brackets_use_exact_fallback() {
        // Golden mean: many cylinder endpoints coincide exactly.
        let p = AlgebraicParameter::from_strs(&[-1, 1, 1], "1/2", "1").unwrap();
        let sys = AffineSystem::bernoulli_convolution(p.generator()).unwrap();
        let w = BernoulliWeights::uniform(2);
        for word in Word::all(2, 8) {
            let bracket = sys.cylinder_interval(&word).unwrap();
            let c = count_covering_words(&sys, &bracket, 5, &w, f64::INFINITY).unwrap();
            assert_eq!((c.beta, c.ambiguous), brute(&sys, &bracket, 5), "{word}");
        }
    }

    #[test]
    fn multi_depth_agrees_with_single() {
        let sys = garsia();
        let w = BernoulliWeights::uniform(2);
        let o = &sample_words(&sys, &w, 14, 1, 8).unwrap()[0];
        let all = count_covering_words_at(&sys, &o.point_interval, &[4, 9, 14], &w, f64::INFINITY).unwrap();
        for c in all {
            let single = count_covering_words(&sys, &o.point_interval, c.depth, &w, f64::INFINITY).unwrap();
            assert_eq!(c, single);
        }
    }

    #[test]
    fn filter_is_monotone_in_tau() {
        let e = 1e-9;
        let lam = FloatScalar::new(0.75, e);
        let sys = AffineSystem::bernoulli_convolution(lam).unwrap();
        let w = BernoulliWeights::new(vec![0.3, 0.7]).unwrap();
        for o in sample_words(&sys, &w, 12, 10, 2).unwrap() {
            let mut last = 0;
            for tau in [0.01, 0.05, 0.2, 1.0, f64::INFINITY] {
                let c = count_covering_words(&sys, &o.point_interval, 12, &w, tau).unwrap();
                assert!(c.filtered >= last && c.filtered <= c.beta);
                last = c.filtered;
                if tau.is_infinite() {
                    assert_eq!(c.filtered, c.beta);
                }
            }
        }
    }

    #[test]
    fn uniform_weights_never_filter() {
        let sys = garsia();
        let w = BernoulliWeights::uniform(2);
        let o = &sample_words(&sys, &w, 10, 1, 4).unwrap()[0];
        let c = count_covering_words(&sys, &o.point_interval, 10, &w, 1e-300).unwrap();
        assert_eq!(c.filtered, c.beta);
    }

    #[test]
    fn rejects_bad_input() {
        let sys = garsia();
        let w = BernoulliWeights::uniform(2);
        let p = sys.maps()[0].ratio.parameter().clone();
        let outside = Interval::new(p.integer(10), p.integer(11));
        assert_eq!(
            count_covering_words(&sys, &outside, 3, &w, f64::INFINITY).unwrap_err(),
            Error::Ifs(IfsError::BracketOutsideHull)
        );
        let inside = Interval::new(p.integer(0), p.integer(0));
        assert!(count_covering_words(&sys, &inside, 3, &w, 0.0).is_err());
        assert!(count_covering_words(&sys, &inside, 0, &w, 1.0).is_err());
    }
}
