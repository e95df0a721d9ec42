//! Shared fixtures: exhaustive covering-word oracle and randomized systems.
#![allow(dead_code)]

use std::sync::Arc;

use num_rational::BigRational;
use overlap_lab::algebraic::{AlgebraicParameter, RingElement};
use overlap_lab::ifs::{AffineContraction, AffineSystem, Interval, Relation, Word};
use overlap_lab::measures::{entropy, BernoulliWeights, SymbolSampler};
use overlap_lab::scalar::{FloatScalar, Scalar, DEFAULT_COLLISION_EPS};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `(beta, filtered)` at one depth.
pub type Counts = (u64, u64);

/// Every cylinder of every depth `1..=max_depth` with its summed log
/// weight, built level by level without pruning.
pub struct Cylinders<S> {
    levels: Vec<Vec<(Interval<S>, (f64, f64), f64)>>,
}

/// Float gap beyond which a cylinder is certainly disjoint from a bracket;
/// far above the rounding error of depth-10 compositions.
const CLEAR_GAP: f64 = 1e-6;

impl<S: Scalar> Cylinders<S> {
    pub fn enumerate(system: &AffineSystem<S>, max_depth: usize, weights: &BernoulliWeights) -> Self {
        let logs = weights.potential();
        let hull = system.hull();
        let (h_lo, h_hi) = hull.to_f64();
        let float_maps: Vec<(f64, f64)> = system.maps().iter().map(|f| (f.ratio.to_f64(), f.offset.to_f64())).collect();
        let one = system.maps()[0].ratio.one_like();
        let mut maps = vec![(one.clone(), one.zero_like(), (1.0, 0.0), 0.0)];
        let mut levels = Vec::with_capacity(max_depth);
        for _ in 0..max_depth {
            // Children in lexicographic order: word `w i` maps x to f_w(f_i(x)).
            maps = maps
                .iter()
                .flat_map(|(r, o, (rf, of), lp)| {
                    system.maps().iter().zip(&float_maps).zip(&logs).map(move |((f, (fr, fo)), l)| {
                        (r.mul(&f.ratio), r.mul(&f.offset).add(o), (rf * fr, rf * fo + of), lp + l)
                    })
                })
                .collect();
            levels.push(
                maps.iter()
                    .map(|(r, o, (rf, of), lp)| {
                        let a = r.mul(&hull.lo).add(o);
                        let b = r.mul(&hull.hi).add(o);
                        let iv = if a.compare(&b).is_le() { Interval::new(a, b) } else { Interval::new(b, a) };
                        let (x, y) = (rf * h_lo + of, rf * h_hi + of);
                        (iv, (x.min(y), x.max(y)), *lp)
                    })
                    .collect(),
            );
        }
        Self { levels }
    }

    /// `(beta, filtered)` per depth: `beta` counts cylinders meeting the
    /// bracket, `filtered` those whose potential average is within `tau` of
    /// `−h`.
    pub fn counts(&self, bracket: &Interval<S>, weights: &BernoulliWeights, tau: f64) -> Vec<Counts> {
        self.counts_for_taus(bracket, weights, &[tau]).remove(0)
    }

    /// `counts` for several tolerances, sharing the geometric comparisons.
    pub fn counts_for_taus(&self, bracket: &Interval<S>, weights: &BernoulliWeights, taus: &[f64]) -> Vec<Vec<Counts>> {
        let target = -entropy(weights);
        let (lo, hi) = bracket.to_f64();
        let mut out = vec![Vec::with_capacity(self.levels.len()); taus.len()];
        for (i, level) in self.levels.iter().enumerate() {
            let depth = (i + 1) as f64;
            let mut counts = vec![(0, 0); taus.len()];
            for (cylinder, (c_lo, c_hi), log_p) in level {
                let clearly_apart = *c_hi < lo - CLEAR_GAP || *c_lo > hi + CLEAR_GAP;
                if clearly_apart || cylinder.relation_to(bracket) == Relation::Disjoint {
                    continue;
                }
                for (c, &tau) in counts.iter_mut().zip(taus) {
                    c.0 += 1;
                    let filter = !weights.is_uniform() && tau.is_finite();
                    if !filter || (log_p / depth - target).abs() < tau {
                        c.1 += 1;
                    }
                }
            }
            for (o, c) in out.iter_mut().zip(counts) {
                o.push(c);
            }
        }
        out
    }
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn rational_system(maps: &[((i64, i64), (i64, i64))]) -> AffineSystem<RingElement> {
    let q = AlgebraicParameter::rationals();
    AffineSystem::new(
        maps.iter()
            .map(|&((a, b), (c, d))| AffineContraction::new(q.rational(rational(a, b)), q.rational(rational(c, d))))
            .collect(),
    )
    .expect("valid system")
}

pub fn bernoulli(coeffs: &[i64]) -> AffineSystem<RingElement> {
    let p = AlgebraicParameter::from_strs(coeffs, "1/2", "1").expect("valid parameter");
    AffineSystem::bernoulli_convolution(p.generator()).expect("valid system")
}

pub fn golden() -> AffineSystem<RingElement> {
    bernoulli(&[-1, 1, 1])
}

pub fn garsia_sqrt2() -> AffineSystem<RingElement> {
    bernoulli(&[-1, 0, 2])
}

/// `{0.3x, 0.3x, 0.3x + 0.7}`.
pub fn block_system() -> AffineSystem<RingElement> {
    rational_system(&[((3, 10), (0, 1)), ((3, 10), (0, 1)), ((3, 10), (7, 10))])
}

pub fn parameter(sys: &AffineSystem<RingElement>) -> &Arc<AlgebraicParameter> {
    sys.maps()[0].ratio.parameter()
}

/// The same maps in floating point with the default collision tolerance.
pub fn to_float(sys: &AffineSystem<RingElement>) -> AffineSystem<FloatScalar> {
    let f = |x: &RingElement| FloatScalar::new(x.to_float(1e-18), DEFAULT_COLLISION_EPS);
    AffineSystem::new(sys.maps().iter().map(|g| AffineContraction::new(f(&g.ratio), f(&g.offset))).collect())
        .expect("valid system")
}

/// A random system over ℚ with small denominators, so exact coincidences and
/// shared endpoints are common. Identical maps and negative ratios occur.
pub fn random_rational_system(rng: &mut ChaCha8Rng) -> AffineSystem<RingElement> {
    const RATIOS: [(i64, i64); 9] = [(1, 2), (1, 3), (2, 3), (2, 5), (3, 5), (1, 4), (3, 4), (-1, 2), (-1, 3)];
    let m = rng.gen_range(2..=3);
    let maps: Vec<_> = (0..m)
        .map(|_| {
            let ratio = *RATIOS.choose(rng).unwrap();
            let den = *[2i64, 3, 4, 6].choose(rng).unwrap();
            (ratio, (rng.gen_range(0..=den), den))
        })
        .collect();
    rational_system(&maps)
}

/// Random weights bounded away from zero.
pub fn random_weights(rng: &mut ChaCha8Rng, m: usize) -> BernoulliWeights {
    let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.2..1.0)).collect();
    let total: f64 = raw.iter().sum();
    BernoulliWeights::new(raw.iter().map(|x| x / total).collect()).expect("valid weights")
}

/// Brackets around sampled points plus degenerate brackets at cylinder
/// endpoints, where ties are exact.
pub fn brackets<S: Scalar>(system: &AffineSystem<S>, seed: u64, points: usize, depth: usize) -> Vec<Interval<S>> {
    let m = system.alphabet_size();
    let sampler = SymbolSampler::new(&BernoulliWeights::uniform(m));
    let mut out: Vec<Interval<S>> = (0..points as u64)
        .map(|i| system.project_point(&sampler.word(seed, i, depth + 20)).expect("valid word"))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for _ in 0..2 {
        let word = Word((0..4).map(|_| rng.gen_range(0..m as u32)).collect());
        let c = system.cylinder_interval(&word).expect("valid word");
        let x = if rng.gen_bool(0.5) { c.lo } else { c.hi };
        out.push(Interval::new(x.clone(), x));
    }
    out
}

/// Number of randomized systems in the oracle comparison.
pub const ORACLE_SYSTEMS: u64 = 20;
/// Deepest level compared against exhaustive enumeration.
pub const ORACLE_DEPTH: usize = 10;

/// Outcome of comparing pruned counts with the exhaustive oracle.
#[derive(Debug, Default)]
pub struct OracleTally {
    pub comparisons: usize,
    pub discrepancies: Vec<String>,
}

fn compare<S: Scalar>(
    label: &str,
    system: &AffineSystem<S>,
    weights: &BernoulliWeights,
    seed: u64,
    tally: &mut OracleTally,
) {
    use overlap_lab::overlap::count_covering_words_at;
    let depths: Vec<usize> = (1..=ORACLE_DEPTH).collect();
    let cylinders = Cylinders::enumerate(system, ORACLE_DEPTH, weights);
    for (b, bracket) in brackets(system, seed, 3, ORACLE_DEPTH).iter().enumerate() {
        let taus = [0.1, f64::INFINITY];
        let oracle_by_tau = cylinders.counts_for_taus(bracket, weights, &taus);
        for (&tau, oracle) in taus.iter().zip(&oracle_by_tau) {
            let pruned = count_covering_words_at(system, bracket, &depths, weights, tau).expect("valid input");
            for (c, &(beta, filtered)) in pruned.iter().zip(oracle) {
                tally.comparisons += 1;
                if (c.beta, c.filtered) != (beta, filtered) {
                    tally.discrepancies.push(format!(
                        "{label} bracket {b} tau {tau} depth {}: pruned ({}, {}) vs oracle ({beta}, {filtered})",
                        c.depth, c.beta, c.filtered
                    ));
                }
            }
        }
    }
}

/// Pruned versus exhaustive counts on `ORACLE_SYSTEMS` random rational
/// systems plus three algebraic Bernoulli convolutions, in exact and float
/// modes, at every depth up to `ORACLE_DEPTH`.
pub fn oracle_comparison(seed: u64) -> OracleTally {
    let mut tally = OracleTally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut systems: Vec<(String, AffineSystem<RingElement>)> = (0..ORACLE_SYSTEMS)
        .map(|i| (format!("random {i}"), random_rational_system(&mut rng)))
        .collect();
    systems.push(("golden".into(), golden()));
    systems.push(("sqrt2".into(), garsia_sqrt2()));
    systems.push(("tribonacci".into(), bernoulli(&[-1, 1, 1, 1])));
    for (i, (label, exact)) in systems.iter().enumerate() {
        let weights = random_weights(&mut rng, exact.alphabet_size());
        let s = seed.wrapping_add(i as u64);
        compare(&format!("{label} exact"), exact, &weights, s, &mut tally);
        compare(&format!("{label} float"), &to_float(exact), &weights, s, &mut tally);
    }
    tally
}
