//! Exact-overlap block structure, overlap families of words, and the closed
//! forms and lower bounds they give for the overlap number.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ifs::{AffineContraction, AffineSystem, Interval, Word};
use crate::measures::BernoulliWeights;
use crate::overlap::spectrum::DEFAULT_NODE_BUDGET;
use crate::scalar::Scalar;

/// Default relative intersection length above which two cylinders are
/// candidates for a common partial-overlap family.
pub const DEFAULT_GROUPING_THRESHOLD: f64 = 0.1;

/// Partition of the alphabet into groups of identical maps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockStructure {
    /// Symbol groups in order of first occurrence, each sorted ascending.
    pub blocks: Vec<Vec<usize>>,
    /// Images of distinct blocks have pairwise disjoint interiors.
    pub osc_between_blocks: bool,
    pub alphabet_size: usize,
}

impl BlockStructure {
    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn block_of(&self, symbol: usize) -> Option<&[usize]> {
        self.blocks.iter().find(|b| b.contains(&symbol)).map(Vec::as_slice)
    }

    fn require_osc(&self) -> Result<()> {
        if self.osc_between_blocks {
            Ok(())
        } else {
            Err(Error::Unsupported(
                "images of different blocks overlap; use the estimator or the family bounds instead".into(),
            ))
        }
    }
}

pub fn detect_blocks<S: Scalar>(system: &AffineSystem<S>) -> BlockStructure {
    let maps = system.maps();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (i, f) in maps.iter().enumerate() {
        match blocks.iter_mut().find(|b| maps[b[0]].same_map(f)) {
            Some(b) => b.push(i),
            None => blocks.push(vec![i]),
        }
    }
    let images: Vec<Interval<S>> = blocks.iter().map(|b| maps[b[0]].apply_interval(system.hull())).collect();
    let osc_between_blocks = (0..images.len())
        .all(|i| (i + 1..images.len()).all(|j| !interiors_meet(&images[i], &images[j])));
    BlockStructure { blocks, osc_between_blocks, alphabet_size: maps.len() }
}

fn interiors_meet<S: Scalar>(a: &Interval<S>, b: &Interval<S>) -> bool {
    let lo = a.lo.max_of(&b.lo);
    let hi = a.hi.min_of(&b.hi);
    lo.compare(&hi) == Ordering::Less
}

/// `log o = Σ_B |B| log |B| / m` for blocks whose images do not overlap.
pub fn block_log_overlap_number(bs: &BlockStructure) -> Result<f64> {
    bs.require_osc()?;
    let m = bs.alphabet_size as f64;
    Ok(bs.sizes().iter().map(|&k| k as f64 * (k as f64).ln()).sum::<f64>() / m)
}

pub fn block_overlap_number(bs: &BlockStructure) -> Result<f64> {
    block_log_overlap_number(bs).map(f64::exp)
}

/// In-fiber weights of the preimages of a point under a block system.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberWeights {
    /// Weight of each symbol given that the point's block is the one of the
    /// queried symbol; zero outside that block.
    pub weights: Vec<f64>,
    /// `Σ_B P(B) · H(p restricted to B)`.
    pub folding_entropy: f64,
}

pub fn fiber_weights_block(bs: &BlockStructure, weights: &BernoulliWeights, symbol: usize) -> Result<FiberWeights> {
    bs.require_osc()?;
    weights.check_alphabet(bs.alphabet_size)?;
    let block = bs
        .block_of(symbol)
        .ok_or_else(|| Error::Contract(format!("symbol {symbol} outside the alphabet")))?;
    let p = weights.probabilities();
    let mass: f64 = block.iter().map(|&i| p[i]).sum();
    let mut fiber = vec![0.0; bs.alphabet_size];
    for &i in block {
        fiber[i] = p[i] / mass;
    }
    Ok(FiberWeights { weights: fiber, folding_entropy: folding_entropy(bs, weights)? })
}

pub fn folding_entropy(bs: &BlockStructure, weights: &BernoulliWeights) -> Result<f64> {
    bs.require_osc()?;
    weights.check_alphabet(bs.alphabet_size)?;
    let p = weights.probabilities();
    Ok(bs
        .blocks
        .iter()
        .map(|b| {
            let mass: f64 = b.iter().map(|&i| p[i]).sum();
            -b.iter().map(|&i| p[i] * (p[i] / mass).ln()).sum::<f64>()
        })
        .sum())
}

/// Words of a common length `p` whose cylinders share a region containing a
/// cylinder of each member extended by its witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OverlapFamily {
    pub p: usize,
    pub members: Vec<Word>,
    /// Same length as `members`; every witness has length `k`.
    pub witness_extensions: Vec<Word>,
    /// `0` for exact overlaps (identical composed maps).
    pub k: usize,
}

impl OverlapFamily {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// `N log N / m^{p+k}`.
    pub fn log_contribution(&self, m: usize) -> f64 {
        let n = self.size() as f64;
        n * n.ln() / (m as f64).powi((self.p + self.k) as i32)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilySearch {
    pub p: usize,
    pub k_max: usize,
    pub threshold: f64,
    pub budget: u64,
}

impl FamilySearch {
    pub fn new(p: usize, k_max: usize) -> Self {
        Self { p, k_max, threshold: DEFAULT_GROUPING_THRESHOLD, budget: DEFAULT_NODE_BUDGET }
    }
}

struct Group<S> {
    map: AffineContraction<S>,
    cylinder: Interval<S>,
    words: Vec<Word>,
}

/// Exact-overlap families (identical depth-`p` maps) followed by partial
/// families found by extension search.
pub fn search_overlap_families<S: Scalar>(system: &AffineSystem<S>, opts: &FamilySearch) -> Result<Vec<OverlapFamily>> {
    let m = system.alphabet_size();
    if opts.p == 0 {
        return Err(Error::Contract("family word length must be positive".into()));
    }
    for exponent in [opts.p, opts.k_max] {
        let needed = (m as u128).checked_pow(exponent as u32).unwrap_or(u128::MAX);
        if needed > opts.budget as u128 {
            return Err(Error::Budget { budget: opts.budget, needed });
        }
    }

    let mut composed = Word::all(m, opts.p)
        .map(|w| system.compose(&w).map(|f| (w, f)))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    // Stable sort keeps words lexicographic inside each group.
    composed.sort_by(|(_, a), (_, b)| a.offset.compare(&b.offset).then_with(|| a.ratio.compare(&b.ratio)));
    let mut groups: Vec<Group<S>> = Vec::new();
    for (w, f) in composed {
        match groups.last_mut() {
            Some(g) if g.map.same_map(&f) => g.words.push(w),
            _ => {
                let cylinder = f.apply_interval(system.hull());
                groups.push(Group { map: f, cylinder, words: vec![w] });
            }
        }
    }
    groups.sort_by(|a, b| a.words[0].cmp(&b.words[0]));

    let mut families: Vec<OverlapFamily> = groups
        .iter()
        .filter(|g| g.words.len() >= 2)
        .map(|g| OverlapFamily {
            p: opts.p,
            members: g.words.clone(),
            witness_extensions: vec![Word::default(); g.words.len()],
            k: 0,
        })
        .collect();

    if opts.k_max > 0 {
        families.extend(partial_families(system, &groups, opts)?);
    }
    Ok(families)
}

fn partial_families<S: Scalar>(
    system: &AffineSystem<S>,
    groups: &[Group<S>],
    opts: &FamilySearch,
) -> Result<Vec<OverlapFamily>> {
    let lengths: Vec<f64> = groups.iter().map(|g| g.cylinder.length().to_f64()).collect();
    let substantial = |i: usize, j: usize| {
        groups[i].cylinder.intersection(&groups[j].cylinder).is_some_and(|iv| {
            let shorter = lengths[i].min(lengths[j]);
            shorter > 0.0 && iv.length().to_f64() >= opts.threshold * shorter
        })
    };

    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by(|&a, &b| groups[a].cylinder.lo.compare(&groups[b].cylinder.lo));
    let mut assigned = vec![false; groups.len()];
    let mut families = Vec::new();
    for (pos, &seed) in order.iter().enumerate() {
        if assigned[seed] {
            continue;
        }
        let mut candidate = vec![seed];
        let mut common = groups[seed].cylinder.clone();
        for &j in &order[pos + 1..] {
            if assigned[j] || !substantial(seed, j) {
                continue;
            }
            if let Some(iv) = common.intersection(&groups[j].cylinder) {
                if iv.length().signum() == Ordering::Greater {
                    candidate.push(j);
                    common = iv;
                }
            }
        }
        if candidate.len() < 2 {
            continue;
        }
        let mut members = Vec::new();
        let mut witnesses = Vec::new();
        let mut used = Vec::new();
        for &g in &candidate {
            let found: Option<Vec<Word>> =
                groups[g].words.iter().map(|w| find_witness(system, w, &common, opts.k_max)).collect();
            if let Some(found) = found {
                members.extend(groups[g].words.iter().cloned());
                witnesses.extend(found);
                used.push(g);
            }
        }
        if used.len() < 2 {
            continue;
        }
        for &g in &used {
            assigned[g] = true;
        }
        let k = witnesses.iter().map(Word::depth).max().unwrap_or(0);
        // Padding keeps the extended cylinder inside the witnessed one.
        let witnesses = witnesses
            .into_iter()
            .map(|w| {
                let pad = vec![0; k - w.depth()];
                w.extended(&pad)
            })
            .collect();
        let mut family = OverlapFamily { p: opts.p, members, witness_extensions: witnesses, k };
        sort_family(&mut family);
        families.push(family);
    }
    families.sort_by(|a, b| a.members[0].cmp(&b.members[0]));
    Ok(families)
}

fn sort_family(family: &mut OverlapFamily) {
    let mut pairs: Vec<(Word, Word)> =
        family.members.drain(..).zip(family.witness_extensions.drain(..)).collect();
    pairs.sort();
    (family.members, family.witness_extensions) = pairs.into_iter().unzip();
}

/// Shortest (then lexicographically first) extension `v` with
/// `cylinder(w v) ⊆ target`.
fn find_witness<S: Scalar>(system: &AffineSystem<S>, w: &Word, target: &Interval<S>, k_max: usize) -> Option<Word> {
    let m = system.alphabet_size();
    (1..=k_max).find_map(|k| {
        Word::all(m, k).find(|v| {
            system
                .cylinder_interval(&w.extended(v.symbols()))
                .is_ok_and(|c| target.contains(&c))
        })
    })
}

/// Lower bound for `log o` from word-disjoint families.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyBound {
    /// `Σ N log N / m^{p+k}` over the selected families. Counted on words of
    /// length `p`, this bounds the overlap number of the `p`-fold iterate.
    pub log_value: f64,
    pub value: f64,
    /// `Σ N log N / (p m^{p+k})`: the same bound per symbol, which bounds
    /// `log o` of the system itself since `o(S^p) = o(S)^p`.
    pub log_per_symbol: f64,
    pub per_symbol: f64,
    /// Indices of the families used, in selection order.
    pub selected: Vec<usize>,
}

/// Greedily picks families by decreasing `N log N / m^{p+k}`, skipping any
/// that reuse a word already selected, and sums their contributions.
pub fn family_lower_bounds(families: &[OverlapFamily], m: usize) -> FamilyBound {
    let mut order: Vec<usize> = (0..families.len()).collect();
    order.sort_by(|&a, &b| {
        families[b]
            .log_contribution(m)
            .total_cmp(&families[a].log_contribution(m))
            .then(a.cmp(&b))
    });
    let mut used: HashSet<&Word> = HashSet::new();
    let mut selected = Vec::new();
    let mut log_value = 0.0;
    let mut log_per_symbol = 0.0;
    for i in order {
        let f = &families[i];
        if f.members.iter().any(|w| used.contains(w)) {
            continue;
        }
        used.extend(f.members.iter());
        selected.push(i);
        log_value += f.log_contribution(m);
        log_per_symbol += f.log_contribution(m) / f.p as f64;
    }
    FamilyBound { log_value, value: log_value.exp(), log_per_symbol, per_symbol: log_per_symbol.exp(), selected }
}
