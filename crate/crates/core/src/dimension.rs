//! Dimension bounds from overlap numbers and an empirical box-counting
//! estimator for the projected Bernoulli measure.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ifs::AffineSystem;
use crate::measures::{default_extra_symbols, entropy, lyapunov, sample_rng, BernoulliWeights, SymbolSampler};
use crate::scalar::Scalar;
use crate::structure::OverlapFamily;

pub const PRESSURE_TOL: f64 = 1e-10;

/// A value that may have been clamped, with the reason.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Checked {
    pub value: f64,
    pub warning: Option<String>,
}

/// Root of `t ↦ log Σ|r_i|^t − log_o`, an upper bound for the Hausdorff
/// dimension of the projected measure.
pub fn pressure_zero<S: Scalar>(system: &AffineSystem<S>, log_o: f64) -> Result<Checked> {
    let ratios: Vec<f64> = system.maps().iter().map(|f| f.ratio.to_f64().abs()).collect();
    let m = ratios.len() as f64;
    if log_o.is_nan() || log_o < 0.0 {
        return Err(Error::Contract(format!("log o must be non-negative, got {log_o}")));
    }
    if log_o > m.ln() {
        return Ok(Checked {
            value: 0.0,
            warning: Some(format!("log o = {log_o} exceeds log m = {}; pressure has no zero, reporting 0", m.ln())),
        });
    }
    let value = match system.constant_ratio() {
        Some(r) => (m.ln() - log_o) / -r.to_f64().abs().ln(),
        None => pressure_zero_bisection(&ratios, log_o),
    };
    Ok(Checked { value, warning: None })
}

/// Bisection for the pressure zero with an arbitrary ratio list.
pub fn pressure_zero_bisection(abs_ratios: &[f64], log_o: f64) -> f64 {
    let pressure = |t: f64| abs_ratios.iter().map(|r| r.powf(t)).sum::<f64>().ln() - log_o;
    if pressure(0.0) <= 0.0 {
        return 0.0;
    }
    let mut hi = 1.0;
    while pressure(hi) >= 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > PRESSURE_TOL * 1e-2 {
        let mid = 0.5 * (lo + hi);
        if pressure(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `(h − log o) / |χ|`, clamped at zero.
pub fn box_dimension_bound(h: f64, log_o: f64, chi_abs: f64) -> Result<Checked> {
    if chi_abs.is_nan() || chi_abs <= 0.0 {
        return Err(Error::Contract(format!("|chi| must be positive, got {chi_abs}")));
    }
    let value = (h - log_o) / chi_abs;
    Ok(if value < 0.0 {
        Checked { value: 0.0, warning: Some(format!("log o = {log_o} exceeds h = {h}; bound clamped to 0")) }
    } else {
        Checked { value, warning: None }
    })
}

/// Box-dimension bound from one family of `n_family` words of length `p`
/// with uniform weights.
pub fn cor_o1_bound(m: usize, p: usize, n_family: usize, h_uniform: f64, chi_abs: f64) -> Result<f64> {
    if (n_family as f64) > (m as f64).powi(p as i32) || n_family == 0 {
        return Err(Error::Contract(format!("family size {n_family} not in 1..=m^p")));
    }
    let n = n_family as f64;
    families_bound(m, p, &[(n, 0)], h_uniform, chi_abs)
}

/// Multi-family variant: the numerator loses `Σ N_j log N_j / m^{p+k_j}`.
pub fn cor_o2_bound(m: usize, p: usize, families: &[OverlapFamily], h_uniform: f64, chi_abs: f64) -> Result<f64> {
    let terms: Vec<(f64, usize)> = families.iter().map(|f| (f.size() as f64, f.k)).collect();
    families_bound(m, p, &terms, h_uniform, chi_abs)
}

fn families_bound(m: usize, p: usize, terms: &[(f64, usize)], h: f64, chi_abs: f64) -> Result<f64> {
    if chi_abs.is_nan() || chi_abs <= 0.0 || p == 0 {
        return Err(Error::Contract("need |chi| > 0 and p >= 1".into()));
    }
    let loss: f64 = terms.iter().map(|&(n, k)| n * n.ln() / (m as f64).powi((p + k) as i32)).sum();
    Ok((p as f64 * h - loss) / (p as f64 * chi_abs))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalParams {
    pub samples: usize,
    /// Box sides are `length(hull) · 2^{-k}` for these `k`, increasing.
    pub scale_exponents: Vec<u32>,
    /// Exponents used in the regression; `None` drops the three coarsest and
    /// the two finest scales.
    pub fit_exponents: Option<(u32, u32)>,
    pub mass_fraction: f64,
    pub seed: u64,
}

impl Default for EmpiricalParams {
    fn default() -> Self {
        Self { samples: 2_000_000, scale_exponents: (4..=14).collect(), fit_exponents: None, mass_fraction: 0.95, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleRow {
    pub exponent: u32,
    pub delta: f64,
    pub boxes: usize,
    pub mass_retained: f64,
    pub occupied: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalBoxDimension {
    pub rows: Vec<ScaleRow>,
    pub fit_exponents: (u32, u32),
    pub slope: f64,
    pub intercept: f64,
    pub mass_fraction: f64,
    pub samples: usize,
    pub warnings: Vec<String>,
}

/// Samples drawn from one generator stream.
const CHUNK: usize = 4096;

/// Slope of `log N(δ)` against `log(1/δ)`, where `N(δ)` is the number of
/// densest `δ`-boxes needed to hold `mass_fraction` of the sampled points.
pub fn empirical_box_dimension<S: Scalar>(
    system: &AffineSystem<S>,
    weights: &BernoulliWeights,
    params: &EmpiricalParams,
) -> Result<EmpiricalBoxDimension> {
    weights.check_alphabet(system.alphabet_size())?;
    let exps = &params.scale_exponents;
    if params.samples == 0 || exps.len() < 2 || exps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Contract("need samples >= 1 and at least two increasing scale exponents".into()));
    }
    if !(params.mass_fraction > 0.5 && params.mass_fraction < 1.0) {
        return Err(Error::Contract(format!("mass fraction must lie in (0.5, 1), got {}", params.mass_fraction)));
    }
    let fit = params.fit_exponents.unwrap_or_else(|| {
        if exps.len() >= 6 {
            (exps[3], exps[exps.len() - 3])
        } else {
            (exps[0], exps[exps.len() - 1])
        }
    });

    let (lo, hi) = system.hull().to_f64();
    let length = if hi > lo { hi - lo } else { 1.0 };
    let maps: Vec<(f64, f64)> = system.maps().iter().map(|f| (f.ratio.to_f64(), f.offset.to_f64())).collect();
    let depth = default_extra_symbols(system.max_abs_ratio()) + exps[exps.len() - 1] as usize;
    let sampler = SymbolSampler::new(weights);
    let start = 0.5 * (lo + hi);

    let chunks = params.samples.div_ceil(CHUNK);
    let mut points: Vec<f64> = (0..chunks as u64)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = sample_rng(params.seed, c);
            let count = CHUNK.min(params.samples - c as usize * CHUNK);
            let mut word = Vec::with_capacity(depth);
            (0..count)
                .map(|_| {
                    word.clear();
                    sampler.extend(&mut rng, &mut word, depth);
                    word.iter().rev().fold(start, |x, &s| {
                        let (r, c) = maps[s as usize];
                        r * x + c
                    })
                })
                .collect::<Vec<_>>()
        })
        .collect();
    points.sort_by(f64::total_cmp);

    let total = points.len();
    let keep = (params.mass_fraction * total as f64).ceil() as usize;
    let mut rows = Vec::with_capacity(exps.len());
    for &k in exps {
        let delta = length * 0.5f64.powi(k as i32);
        let mut counts: Vec<usize> = Vec::new();
        let mut current = None;
        for &x in &points {
            let b = ((x - lo) / delta).floor() as i64;
            if current == Some(b) {
                *counts.last_mut().unwrap() += 1;
            } else {
                counts.push(1);
                current = Some(b);
            }
        }
        let occupied = counts.len();
        counts.sort_unstable_by(|a, b| b.cmp(a));
        let mut mass = 0;
        let mut boxes = 0;
        for c in counts {
            if mass >= keep {
                break;
            }
            mass += c;
            boxes += 1;
        }
        rows.push(ScaleRow { exponent: k, delta, boxes, mass_retained: mass as f64 / total as f64, occupied });
    }

    let fitted: Vec<&ScaleRow> = rows.iter().filter(|r| r.exponent >= fit.0 && r.exponent <= fit.1).collect();
    if fitted.len() < 2 {
        return Err(Error::Contract(format!("fit window {fit:?} holds fewer than two scales")));
    }
    let xs: Vec<f64> = fitted.iter().map(|r| (1.0 / r.delta).ln()).collect();
    let ys: Vec<f64> = fitted.iter().map(|r| (r.boxes as f64).ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);

    let mut warnings = Vec::new();
    let finest = rows.last().unwrap();
    let per_box = total as f64 / finest.occupied as f64;
    if per_box < 100.0 {
        warnings.push(format!(
            "undersampled: {per_box:.1} samples per occupied box at the finest scale (2^-{})",
            finest.exponent
        ));
    }
    Ok(EmpiricalBoxDimension {
        rows,
        fit_exponents: fit,
        slope,
        intercept,
        mass_fraction: params.mass_fraction,
        samples: total,
        warnings,
    })
}

pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, ym - slope * xm)
}

/// Where a value of `log o` came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    SlopeEstimate,
    LowerBound,
    UserSupplied,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogOverlap {
    pub value: f64,
    pub stderr: Option<f64>,
    pub provenance: Provenance,
    /// Name of the formula or estimator.
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionReport {
    pub entropy: f64,
    pub lyapunov_abs: f64,
    pub log_o: LogOverlap,
    pub hd_bound_t: f64,
    pub box_bound: f64,
    pub empirical: Option<EmpiricalBoxDimension>,
    pub warnings: Vec<String>,
}

impl DimensionReport {
    pub fn new<S: Scalar>(system: &AffineSystem<S>, weights: &BernoulliWeights, log_o: LogOverlap) -> Result<Self> {
        let h = entropy(weights);
        let chi = lyapunov(system, weights)?.abs;
        let t = pressure_zero(system, log_o.value.max(0.0))?;
        let b = box_dimension_bound(h, log_o.value, chi)?;
        let warnings = [t.warning, b.warning].into_iter().flatten().collect();
        Ok(Self {
            entropy: h,
            lyapunov_abs: chi,
            log_o,
            hd_bound_t: t.value,
            box_bound: b.value,
            empirical: None,
            warnings,
        })
    }
}
