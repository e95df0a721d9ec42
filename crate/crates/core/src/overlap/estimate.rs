//! Monte Carlo estimation of the overlap number from covering-word counts at
//! a range of depths.
//!
//! Every sample draws one symbol sequence and is counted at all depths in a
//! single descent, so the per-depth means share their randomness and the
//! regression slope of `mean log count` on depth has small variance. The
//! slope cancels additive constants and is the headline estimate of `log o`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::AffineSystem;
use crate::measures::{default_extra_symbols, sample_rng, BernoulliWeights, SymbolSampler};
use crate::overlap::count::count_for_word;
use crate::scalar::Scalar;

/// Ambiguous-count fraction above which a depth is flagged.
pub const AMBIGUOUS_WARNING_FRACTION: f64 = 0.01;

/// Default tolerance on the Birkhoff average for non-uniform weights.
pub const DEFAULT_TAU: f64 = 0.05;

/// Which depths enter the slope regression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitWindow {
    /// The larger half of the depths (at least two).
    TopHalf,
    All,
    /// Depths `>=` the given one.
    FromDepth(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapParams {
    pub depths: Vec<usize>,
    pub samples: usize,
    #[serde(serialize_with = "serialize_tau")]
    pub tau: f64,
    pub seed: u64,
    /// Symbols past the largest depth used for the point bracket; `None`
    /// picks `ceil(40 / |log max ratio|)`.
    pub extra_symbols: Option<usize>,
    /// Bracket refinements allowed when a count is ambiguous.
    pub max_retries: usize,
    pub fit: FitWindow,
}

impl OverlapParams {
    pub fn new(depths: Vec<usize>, samples: usize, seed: u64) -> Self {
        Self { depths, samples, tau: f64::INFINITY, seed, extra_symbols: None, max_retries: 3, fit: FitWindow::TopHalf }
    }

    /// `∞` for uniform weights, `DEFAULT_TAU` otherwise.
    pub fn default_tau(weights: &BernoulliWeights) -> f64 {
        if weights.is_uniform() {
            f64::INFINITY
        } else {
            DEFAULT_TAU
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthRow {
    pub depth: usize,
    pub mean_log_count: f64,
    pub stderr: f64,
    pub exp_mean_over_n: f64,
    pub ambiguous_fraction: f64,
    pub mean_visits: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub depths: Vec<usize>,
    pub slope: f64,
    pub intercept: f64,
    /// Standard error from the spread of per-sample slopes.
    pub stderr: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    Slope,
    LastDepth,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapEstimate {
    pub rows: Vec<DepthRow>,
    pub slope: Option<SlopeFit>,
    /// `exp(mean / n)` at the largest depth.
    pub last_depth_value: f64,
    /// Headline estimate of `o`.
    pub estimate: f64,
    pub log_estimate: f64,
    pub log_stderr: f64,
    pub method: EstimateMethod,
    pub samples: usize,
    #[serde(serialize_with = "serialize_tau")]
    pub tau: f64,
    pub warnings: Vec<String>,
}

struct SampleResult {
    log_counts: Vec<f64>,
    ambiguous: Vec<bool>,
    visits: Vec<u64>,
}

pub fn estimate_overlap_number<S: Scalar>(
    system: &AffineSystem<S>,
    weights: &BernoulliWeights,
    params: &OverlapParams,
) -> Result<OverlapEstimate> {
    weights.check_alphabet(system.alphabet_size())?;
    let depths = &params.depths;
    if depths.is_empty() || depths[0] == 0 || depths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Contract("depths must be positive and strictly increasing".into()));
    }
    if params.tau.is_nan() || params.tau <= 0.0 {
        return Err(Error::Contract(format!("tau must be positive or infinite, got {}", params.tau)));
    }
    if params.samples == 0 {
        return Err(Error::Contract("samples must be at least 1".into()));
    }
    let max_depth = *depths.last().unwrap();
    let extra = params
        .extra_symbols
        .unwrap_or_else(|| default_extra_symbols(system.max_abs_ratio()))
        .max(1);
    let sampler = SymbolSampler::new(weights);

    let per_sample: Vec<SampleResult> = (0..params.samples as u64)
        .into_par_iter()
        .map(|index| {
            let mut rng = sample_rng(params.seed, index);
            let mut word = Vec::with_capacity(max_depth + extra);
            sampler.extend(&mut rng, &mut word, max_depth + extra);
            let mut attempt = 0;
            loop {
                let counts = count_for_word(system, &word, depths, weights, params.tau);
                let ambiguous = counts.iter().any(|c| c.ambiguous);
                if !ambiguous || attempt >= params.max_retries {
                    return SampleResult {
                        // The sampled word always covers its own point.
                        log_counts: counts.iter().map(|c| (c.filtered.max(1) as f64).ln()).collect(),
                        ambiguous: counts.iter().map(|c| c.ambiguous).collect(),
                        visits: counts.iter().map(|c| c.visits).collect(),
                    };
                }
                attempt += 1;
                sampler.extend(&mut rng, &mut word, extra);
            }
        })
        .collect();

    Ok(summarize(depths, params, &per_sample, system.alphabet_size()))
}

fn summarize(depths: &[usize], params: &OverlapParams, samples: &[SampleResult], m: usize) -> OverlapEstimate {
    let count = samples.len() as f64;
    let mut rows = Vec::with_capacity(depths.len());
    let mut warnings = Vec::new();
    for (k, &depth) in depths.iter().enumerate() {
        let values: Vec<f64> = samples.iter().map(|s| s.log_counts[k]).collect();
        let (mean, stderr) = mean_and_stderr(&values);
        let ambiguous = samples.iter().filter(|s| s.ambiguous[k]).count() as f64 / count;
        if ambiguous > AMBIGUOUS_WARNING_FRACTION {
            warnings.push(format!(
                "depth {depth}: {:.2}% of counts ambiguous after bracket refinement",
                100.0 * ambiguous
            ));
        }
        let visits = neumaier_sum(samples.iter().map(|s| s.visits[k] as f64)) / count;
        let exp_mean = (mean / depth as f64).exp().clamp(1.0, m as f64);
        rows.push(DepthRow {
            depth,
            mean_log_count: mean,
            stderr,
            exp_mean_over_n: exp_mean,
            ambiguous_fraction: ambiguous,
            mean_visits: visits,
        });
    }

    let fit_idx: Vec<usize> = match params.fit {
        FitWindow::All => (0..depths.len()).collect(),
        FitWindow::TopHalf => {
            let take = depths.len().div_ceil(2).max(2).min(depths.len());
            (depths.len() - take..depths.len()).collect()
        }
        FitWindow::FromDepth(d) => (0..depths.len()).filter(|&i| depths[i] >= d).collect(),
    };
    let slope = (fit_idx.len() >= 2).then(|| {
        let xs: Vec<f64> = fit_idx.iter().map(|&i| depths[i] as f64).collect();
        let x_mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
        let weights: Vec<f64> = xs.iter().map(|x| (x - x_mean) / sxx).collect();
        let per_sample: Vec<f64> = samples
            .iter()
            .map(|s| fit_idx.iter().zip(&weights).map(|(&i, w)| w * s.log_counts[i]).sum())
            .collect();
        let (slope, stderr) = mean_and_stderr(&per_sample);
        let y_mean = fit_idx.iter().map(|&i| rows[i].mean_log_count).sum::<f64>() / xs.len() as f64;
        SlopeFit {
            depths: fit_idx.iter().map(|&i| depths[i]).collect(),
            slope,
            intercept: y_mean - slope * x_mean,
            stderr,
        }
    });

    let last = rows.last().unwrap();
    let last_depth_value = last.exp_mean_over_n;
    let (method, log_estimate, log_stderr) = match &slope {
        Some(fit) => (EstimateMethod::Slope, fit.slope, fit.stderr),
        None => (EstimateMethod::LastDepth, last_depth_value.ln(), last.stderr / last.depth as f64),
    };
    OverlapEstimate {
        rows,
        slope,
        last_depth_value,
        estimate: log_estimate.exp(),
        log_estimate,
        log_stderr,
        method,
        samples: samples.len(),
        tau: params.tau,
        warnings,
    }
}

/// Writes an infinite tolerance as the string `"inf"`, which JSON can carry.
pub(crate) fn serialize_tau<S: serde::Serializer>(tau: &f64, s: S) -> Result<S::Ok, S::Error> {
    if tau.is_finite() {
        s.serialize_f64(*tau)
    } else {
        s.serialize_str("inf")
    }
}

/// Compensated sum in iteration order.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Mean and standard error of the mean.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = neumaier_sum(values.iter().copied()) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = neumaier_sum(values.iter().map(|v| (v - mean).powi(2))) / (n - 1.0);
    (mean, (var / n).sqrt())
}
