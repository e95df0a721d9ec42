//! Exact enumeration of the depth-`n` composed maps with their
//! multiplicities.
//!
//! Maps are deduplicated level by level: `φ_{wj}` depends on `w` only through
//! `φ_w`, so each level is built from the distinct maps of the previous one
//! and the work grows with the number of distinct values rather than `m^n`.

use std::collections::HashMap;

use serde::Serialize;

use crate::algebraic::{sort_exact, RingElement};
use crate::error::{Error, Result};
use crate::ifs::AffineSystem;
use crate::overlap::estimate::neumaier_sum;
use crate::scalar::Scalar;

/// Default cap on `m^n` for exhaustive enumeration.
pub const DEFAULT_NODE_BUDGET: u64 = 1 << 26;

/// One distinct composed map. `value` is its image of `0`, i.e. its offset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumEntry {
    pub value: RingElement,
    pub ratio: RingElement,
    pub multiplicity: u64,
}

#[derive(Clone, Debug)]
pub struct ValueSpectrum {
    pub depth: usize,
    pub alphabet_size: usize,
    /// Sorted by value, then ratio.
    pub entries: Vec<SpectrumEntry>,
    /// Number of distinct composed maps.
    pub q_n: usize,
    /// Smallest positive gap between consecutive distinct values.
    pub min_gap: Option<f64>,
    /// Whether all depth-`n` maps share one ratio, so maps are classified by
    /// value alone.
    pub constant_ratio: bool,
}

/// Row of the spectrum CSV.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumRow {
    pub value_float: f64,
    pub multiplicity: u64,
}

impl ValueSpectrum {
    pub fn values(&self) -> impl Iterator<Item = &RingElement> {
        self.entries.iter().map(|e| &e.value)
    }

    pub fn multiplicities(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|e| e.multiplicity)
    }

    pub fn rows(&self) -> Vec<SpectrumRow> {
        self.entries
            .iter()
            .map(|e| SpectrumRow { value_float: e.value.to_float(1e-15), multiplicity: e.multiplicity })
            .collect()
    }
}

pub fn value_spectrum(system: &AffineSystem<RingElement>, n: usize, budget: u64) -> Result<ValueSpectrum> {
    if n == 0 {
        return Err(Error::Contract("spectrum depth must be positive".into()));
    }
    let m = system.alphabet_size();
    let needed = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(Error::Budget { budget, needed });
    }
    let maps = system.maps();
    let mut level: HashMap<(RingElement, RingElement), u64> = HashMap::new();
    for f in maps {
        *level.entry((f.ratio.clone(), f.offset.clone())).or_default() += 1;
    }
    for _ in 1..n {
        let mut next = HashMap::with_capacity(level.len() * m);
        for ((ratio, offset), count) in &level {
            for f in maps {
                let key = (ratio * &f.ratio, offset + &(ratio * &f.offset));
                *next.entry(key).or_default() += count;
            }
        }
        level = next;
    }

    let constant_ratio = system.constant_ratio().is_some();
    let mut entries: Vec<SpectrumEntry> = level
        .into_iter()
        .map(|((ratio, value), multiplicity)| SpectrumEntry { value, ratio, multiplicity })
        .collect();
    // Float keys give a cheap near-sorted order; exact comparison settles it.
    let mut keys: Vec<(f64, SpectrumEntry)> = entries.drain(..).map(|e| (e.value.to_f64(), e)).collect();
    keys.sort_by(|(ka, a), (kb, b)| {
        if (ka - kb).abs() > 1e-9 * (1.0 + ka.abs().max(kb.abs())) {
            ka.total_cmp(kb)
        } else {
            a.value.compare(&b.value).then_with(|| a.ratio.compare(&b.ratio))
        }
    });
    entries = keys.into_iter().map(|(_, e)| e).collect();

    let mut distinct: Vec<RingElement> = entries.iter().map(|e| e.value.clone()).collect();
    distinct.dedup();
    sort_exact(&mut distinct);
    let min_gap = distinct
        .windows(2)
        .map(|w| (&w[1] - &w[0]).to_float(1e-30))
        .filter(|g| *g > 0.0)
        .min_by(f64::total_cmp);

    Ok(ValueSpectrum { depth: n, alphabet_size: m, q_n: entries.len(), entries, min_gap, constant_ratio })
}

/// `(1/n) Σ_j (N_j / m^n) log N_j`: the mean log-multiplicity per symbol of
/// a uniformly chosen word, a lower-bound estimator for `log o`.
pub fn multiplicity_entropy_bound(spectrum: &ValueSpectrum) -> f64 {
    let total = (spectrum.alphabet_size as f64).powi(spectrum.depth as i32);
    let sum = neumaier_sum(spectrum.multiplicities().map(|n| {
        let n = n as f64;
        n / total * n.ln()
    }));
    sum / spectrum.depth as f64
}
