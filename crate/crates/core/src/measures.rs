//! Bernoulli measures on the symbol space, their entropy and Lyapunov
//! exponent, the potential `ψ(ω, x) = log p_{ω1}`, and reproducible sampling
//! of symbol sequences.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Result;
use crate::ifs::{AffineSystem, Interval, Word};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightsError {
    #[error("weights must be non-empty")]
    Empty,
    #[error("weight {index} is {value}; every weight must be positive")]
    NonPositive { index: usize, value: f64 },
    #[error("weights sum to {0}, expected 1 within 1e-12")]
    NotNormalized(f64),
    #[error("weights have {got} entries but the system has {expected} maps")]
    Length { got: usize, expected: usize },
}

/// Probability vector `p` defining the Bernoulli measure `μ_p⁺`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernoulliWeights {
    p: Vec<f64>,
    uniform: bool,
}

impl BernoulliWeights {
    pub fn new(p: Vec<f64>) -> Result<Self, WeightsError> {
        if p.is_empty() {
            return Err(WeightsError::Empty);
        }
        if let Some((index, &value)) = p.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(WeightsError::NonPositive { index, value });
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(WeightsError::NotNormalized(sum));
        }
        let uniform = p.iter().all(|&x| x == p[0]);
        Ok(Self { p, uniform })
    }

    /// The measure of maximal entropy on `m` symbols.
    pub fn uniform(m: usize) -> Self {
        Self { p: vec![1.0 / m as f64; m], uniform: true }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Maximal-entropy flag.
    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    pub fn check_alphabet(&self, m: usize) -> Result<(), WeightsError> {
        if self.p.len() == m {
            Ok(())
        } else {
            Err(WeightsError::Length { got: self.p.len(), expected: m })
        }
    }

    /// `log p_i` per symbol.
    pub fn potential(&self) -> Vec<f64> {
        self.p.iter().map(|x| x.ln()).collect()
    }
}

/// `-Σ p_i log p_i`, natural log.
pub fn entropy(w: &BernoulliWeights) -> f64 {
    if w.is_uniform() {
        return (w.len() as f64).ln();
    }
    -w.p.iter().map(|&p| p * p.ln()).sum::<f64>()
}

/// Lyapunov exponent of an affine system under a Bernoulli measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lyapunov {
    /// `Σ p_i log|r_i|`, negative for contractions.
    pub signed: f64,
    /// `|χ| = Σ p_i (−log|r_i|)`.
    pub abs: f64,
}

pub fn lyapunov<S: Scalar>(system: &AffineSystem<S>, w: &BernoulliWeights) -> Result<Lyapunov, WeightsError> {
    w.check_alphabet(system.alphabet_size())?;
    let signed: f64 = system
        .maps()
        .iter()
        .zip(&w.p)
        .map(|(f, p)| p * f.ratio.to_f64().abs().ln())
        .sum();
    Ok(Lyapunov { signed, abs: signed.abs() })
}

/// `(1/n) Σ_k log p_{word_k}`.
pub fn birkhoff_potential_average(w: &BernoulliWeights, word: &Word) -> f64 {
    assert!(word.depth() >= 1, "Birkhoff average needs a non-empty word");
    if w.is_uniform() {
        return -(w.len() as f64).ln();
    }
    word.symbols().iter().map(|&s| w.p[s as usize].ln()).sum::<f64>() / word.depth() as f64
}

/// Extra symbols beyond depth `n` so the point bracket is about `e^-40`
/// times the depth-`n` cylinder.
pub fn default_extra_symbols(max_abs_ratio: f64) -> usize {
    (40.0 / max_abs_ratio.ln().abs()).ceil() as usize
}

/// Per-sample generator: ChaCha8 keyed by the seed, one stream per sample
/// index, so any subset of samples can be drawn in any order.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws i.i.d. symbols per `p`.
#[derive(Clone, Debug)]
pub struct SymbolSampler {
    dist: WeightedIndex<f64>,
}

impl SymbolSampler {
    pub fn new(w: &BernoulliWeights) -> Self {
        Self { dist: WeightedIndex::new(&w.p).expect("validated weights") }
    }

    pub fn extend(&self, rng: &mut ChaCha8Rng, word: &mut Vec<u32>, count: usize) {
        word.extend((0..count).map(|_| self.dist.sample(rng) as u32));
    }

    pub fn word(&self, seed: u64, index: u64, len: usize) -> Word {
        let mut rng = sample_rng(seed, index);
        let mut v = Vec::with_capacity(len);
        self.extend(&mut rng, &mut v, len);
        Word(v)
    }
}

/// A sampled symbol sequence truncated at `word.depth()` symbols, with the
/// bracket around its projection.
#[derive(Clone, Debug)]
pub struct SampledOrbit<S> {
    pub word: Word,
    pub depth: usize,
    pub point_interval: Interval<S>,
    pub seed_id: u64,
}

/// `count` i.i.d. words of depth `n + default_extra_symbols`, deterministic in
/// `seed`.
pub fn sample_words<S: Scalar>(
    system: &AffineSystem<S>,
    w: &BernoulliWeights,
    n: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<SampledOrbit<S>>> {
    assert!(n >= 1 && count >= 1, "sample_words needs n >= 1 and count >= 1");
    w.check_alphabet(system.alphabet_size())?;
    let truncation = n + default_extra_symbols(system.max_abs_ratio());
    let sampler = SymbolSampler::new(w);
    (0..count as u64)
        .into_par_iter()
        .map(|index| {
            let word = sampler.word(seed, index, truncation);
            let point_interval = system.project_point(&word)?;
            Ok(SampledOrbit { word, depth: n, point_interval, seed_id: index })
        })
        .collect()
}
