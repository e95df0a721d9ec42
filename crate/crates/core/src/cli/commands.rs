//! Implementations of the subcommands.

use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebraic::{AlgebraicParameter, ParameterClass, RingElement};
use crate::dimension::{
    box_dimension_bound, cor_o2_bound, empirical_box_dimension, DimensionReport, EmpiricalParams, LogOverlap,
    Provenance,
};
use crate::error::Error;
use crate::ifs::AffineSystem;
use crate::measures::{entropy, lyapunov, BernoulliWeights, Lyapunov};
use crate::overlap::{
    estimate_overlap_number, multiplicity_entropy_bound, value_spectrum, OverlapEstimate, OverlapParams,
};
use crate::scalar::Scalar;
use crate::structure::{
    block_log_overlap_number, detect_blocks, family_lower_bounds, fiber_weights_block, folding_entropy,
    search_overlap_families, BlockStructure, FamilyBound, FamilySearch, OverlapFamily,
};

use super::config::{build_system, on_system, AnySystem, MinpolySpec, ParameterChoice, RunConfig};
use super::report::{write_csv, write_gnuplot, write_json, AnalysisReport, PlotSpec};
use super::{CliError, Command, GlobalArgs};

pub fn dispatch(command: &Command, cfg: &RunConfig, sys: &AnySystem, global: &GlobalArgs) -> Result<Vec<String>, CliError> {
    let out = global.out.as_deref();
    let name = command.name();
    match command {
        Command::Analyze(_) => {
            let (results, warnings) = analyze(cfg, sys)?;
            write_json(out, &AnalysisReport::new(name, cfg, results, warnings.clone()))?;
            Ok(warnings)
        }
        Command::Overlap(_) => {
            let est = estimate(cfg, sys)?;
            let rows: Vec<OverlapRow> = est
                .rows
                .iter()
                .map(|r| OverlapRow {
                    depth: r.depth,
                    mean_log_count: r.mean_log_count,
                    stderr: r.stderr,
                    exp_mean_over_n: r.exp_mean_over_n,
                    ambiguous_fraction: r.ambiguous_fraction,
                })
                .collect();
            write_csv(out, &rows)?;
            eprintln!("o estimate: {} (log {} ± {}, {:?})", est.estimate, est.log_estimate, est.log_stderr, est.method);
            plot(global, out, PlotSpec {
                title: "exp(mean log count / n)",
                x_column: 1,
                y_column: 4,
                x_label: "depth",
                y_label: "exp(mean/n)",
                logscale_y: false,
            })?;
            Ok(est.warnings)
        }
        Command::Spectrum { .. } => {
            let exact = sys
                .exact()
                .ok_or_else(|| CliError::Config("spectrum needs exact arithmetic (minpoly or rational maps)".into()))?;
            let spec = value_spectrum(exact, cfg.spectrum_depth, cfg.spectrum_budget)?;
            write_csv(out, &spec.rows())?;
            let bound = multiplicity_entropy_bound(&spec);
            eprintln!(
                "depth {}: q_n = {}, min_gap = {:?}, multiplicity bound log o >= {bound} (o >= {})",
                spec.depth,
                spec.q_n,
                spec.min_gap,
                bound.exp()
            );
            plot(global, out, PlotSpec {
                title: "value multiplicities",
                x_column: 1,
                y_column: 2,
                x_label: "value",
                y_label: "multiplicity",
                logscale_y: true,
            })?;
            Ok(Vec::new())
        }
        Command::Structure { .. } => {
            let (results, warnings) = structure(cfg, sys)?;
            write_json(out, &AnalysisReport::new(name, cfg, results, warnings.clone()))?;
            Ok(warnings)
        }
        Command::Bound { .. } => {
            let log_o = resolve_log_o(cfg, sys)?;
            let report = on_system!(sys, s => DimensionReport::new(s, &cfg.weights(), log_o))?;
            let warnings = report.warnings.clone();
            write_json(out, &AnalysisReport::new(name, cfg, report, warnings.clone()))?;
            Ok(warnings)
        }
        Command::Empdim { .. } => {
            let params = empirical_params(cfg);
            let e = on_system!(sys, s => empirical_box_dimension(s, &cfg.weights(), &params))?;
            write_csv(out, &e.rows)?;
            eprintln!("box-counting slope over 2^-{}..2^-{}: {}", e.fit_exponents.0, e.fit_exponents.1, e.slope);
            plot(global, out, PlotSpec {
                title: "boxes holding the mass fraction",
                x_column: 1,
                y_column: 3,
                x_label: "k (box side = L 2^-k)",
                y_label: "boxes",
                logscale_y: true,
            })?;
            Ok(e.warnings)
        }
        Command::Sweep { .. } => {
            let (rows, warnings) = sweep(cfg)?;
            write_csv(out, &rows)?;
            plot(global, out, PlotSpec {
                title: "overlap number estimate",
                x_column: 2,
                y_column: 3,
                x_label: "parameter",
                y_label: "o",
                logscale_y: false,
            })?;
            Ok(warnings)
        }
    }
}

fn plot(global: &GlobalArgs, out: Option<&Path>, spec: PlotSpec<'_>) -> Result<(), CliError> {
    if !global.gnuplot {
        return Ok(());
    }
    let out = out.ok_or_else(|| CliError::Config("--gnuplot needs --out".into()))?;
    write_gnuplot(out, &spec)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct OverlapRow {
    depth: usize,
    mean_log_count: f64,
    stderr: f64,
    exp_mean_over_n: f64,
    ambiguous_fraction: f64,
}

fn estimate(cfg: &RunConfig, sys: &AnySystem) -> Result<OverlapEstimate, Error> {
    on_system!(sys, s => estimate_overlap_number(s, &cfg.weights(), &cfg.overlap))
}

fn empirical_params(cfg: &RunConfig) -> EmpiricalParams {
    EmpiricalParams {
        samples: cfg.empdim.samples,
        scale_exponents: cfg.empdim.scale_exponents.clone(),
        fit_exponents: cfg.empdim.fit.map(|[a, b]| (a, b)),
        mass_fraction: cfg.empdim.mass_fraction,
        seed: cfg.seed,
    }
}

/// A value of `log o` with the formula it came from.
#[derive(Clone, Debug, Serialize)]
pub struct Tagged {
    pub formula: &'static str,
    pub provenance: Provenance,
    pub log_o: f64,
    pub o: f64,
}

impl Tagged {
    fn new(formula: &'static str, provenance: Provenance, log_o: f64) -> Self {
        Self { formula, provenance, log_o, o: log_o.exp() }
    }

    fn as_log_overlap(&self) -> LogOverlap {
        LogOverlap { value: self.log_o, stderr: None, provenance: self.provenance, source: self.formula.into() }
    }
}

/// `λ` when the system is `{λx + a, λx + b}` with `a ≠ b` over an algebraic
/// parameter, i.e. a rescaled Bernoulli convolution.
fn bernoulli_parameter(sys: &AffineSystem<RingElement>) -> Option<(Arc<AlgebraicParameter>, f64)> {
    let maps = sys.maps();
    if maps.len() != 2 {
        return None;
    }
    let param = maps[0].ratio.parameter().clone();
    let lambda = param.generator();
    let same_ratio = maps.iter().all(|f| f.ratio == lambda);
    let distinct = maps[0].offset != maps[1].offset;
    (param.degree() >= 2 && same_ratio && distinct).then(|| (param.clone(), lambda.to_f64()))
}

fn parameter_class(sys: &AnySystem) -> Option<ParameterClass> {
    let exact = sys.exact()?;
    let param = exact.maps()[0].ratio.parameter();
    (param.degree() >= 2).then(|| param.classify())
}

fn blocks_of(sys: &AnySystem) -> BlockStructure {
    on_system!(sys, s => detect_blocks(s))
}

/// Closed forms available for this system and weights.
fn closed_forms(cfg: &RunConfig, sys: &AnySystem) -> Vec<Tagged> {
    let mut out = Vec::new();
    let weights = cfg.weights();
    if let Some(exact) = sys.exact() {
        if let Some((param, lambda)) = bernoulli_parameter(exact) {
            if weights.is_uniform() && param.classify() == ParameterClass::GarsiaReciprocal {
                out.push(Tagged::new("garsia_two_lambda", Provenance::ClosedForm, (2.0 * lambda).ln()));
            }
        }
    }
    let bs = blocks_of(sys);
    if let Ok(f) = folding_entropy(&bs, &weights) {
        out.push(Tagged::new("block_folding_entropy", Provenance::ClosedForm, f));
    }
    out
}

struct LowerBounds {
    bounds: Vec<Tagged>,
    families: Option<(Vec<OverlapFamily>, FamilyBound)>,
    spectrum: Option<SpectrumSummary>,
    warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumSummary {
    pub depth: usize,
    pub q_n: usize,
    pub min_gap: Option<f64>,
    pub multiplicity_bound: f64,
}

fn lower_bounds(cfg: &RunConfig, sys: &AnySystem) -> Result<LowerBounds, CliError> {
    let mut out = LowerBounds { bounds: Vec::new(), families: None, spectrum: None, warnings: Vec::new() };
    if !cfg.weights_uniform {
        return Ok(out);
    }
    if let Some(exact) = sys.exact() {
        if let Some((param, lambda)) = bernoulli_parameter(exact) {
            if param.classify() == ParameterClass::PisotReciprocal && 2.0 * lambda > 1.0 {
                out.bounds.push(Tagged::new("pisot_two_lambda", Provenance::LowerBound, (2.0 * lambda).ln()));
            }
        }
        match value_spectrum(exact, cfg.spectrum_depth, cfg.spectrum_budget) {
            Ok(spec) => {
                let bound = multiplicity_entropy_bound(&spec);
                out.bounds.push(Tagged::new("multiplicity_entropy", Provenance::LowerBound, bound));
                out.spectrum = Some(SpectrumSummary {
                    depth: spec.depth,
                    q_n: spec.q_n,
                    min_gap: spec.min_gap,
                    multiplicity_bound: bound,
                });
            }
            Err(e @ Error::Budget { .. }) => out.warnings.push(format!("spectrum skipped: {e}")),
            Err(e) => return Err(e.into()),
        }
    }
    match families(cfg, sys) {
        Ok((fams, bound)) => {
            out.bounds.push(Tagged::new("family_bound_per_symbol", Provenance::LowerBound, bound.log_per_symbol));
            out.families = Some((fams, bound));
        }
        Err(e @ Error::Budget { .. }) => out.warnings.push(format!("family search skipped: {e}")),
        Err(e) => return Err(e.into()),
    }
    Ok(out)
}

fn families(cfg: &RunConfig, sys: &AnySystem) -> Result<(Vec<OverlapFamily>, FamilyBound), Error> {
    let opts = FamilySearch {
        p: cfg.structure.p,
        k_max: cfg.structure.kmax,
        threshold: cfg.structure.threshold,
        budget: cfg.structure.budget,
    };
    let fams = on_system!(sys, s => search_overlap_families(s, &opts))?;
    let bound = family_lower_bounds(&fams, sys.alphabet_size());
    Ok((fams, bound))
}

#[derive(Debug, Serialize)]
pub struct SystemSummary {
    pub alphabet_size: usize,
    pub exact: bool,
    pub parameter: String,
    pub parameter_class: Option<ParameterClass>,
    pub hull: [f64; 2],
    /// `(ratio, offset)` per map.
    pub maps: Vec<[f64; 2]>,
}

fn summary(cfg: &RunConfig, sys: &AnySystem) -> SystemSummary {
    let (hull, maps, exact) = on_system!(sys, s => {
        let (lo, hi) = s.hull().to_f64();
        let maps = s.maps().iter().map(|f| [f.ratio.to_f64(), f.offset.to_f64()]).collect();
        ([lo, hi], maps, s.is_exact())
    });
    SystemSummary {
        alphabet_size: sys.alphabet_size(),
        exact,
        parameter: cfg.parameter.label(),
        parameter_class: parameter_class(sys),
        hull,
        maps,
    }
}

#[derive(Debug, Serialize)]
pub struct AnalyzeResults {
    pub system: SystemSummary,
    pub entropy: f64,
    pub lyapunov: Lyapunov,
    pub blocks: BlockStructure,
    pub overlap: OverlapEstimate,
    pub o_estimate: f64,
    pub o_stderr: f64,
    pub closed_forms: Vec<Tagged>,
    pub lower_bounds: Vec<Tagged>,
    pub spectrum: Option<SpectrumSummary>,
    pub families: Option<Vec<OverlapFamily>>,
    pub dimension: DimensionReport,
    pub box_bound: f64,
    pub hd_bound: f64,
    /// Box bound using the largest lower bound on `log o`.
    pub box_bound_from_lower_bound: Option<f64>,
}

fn analyze(cfg: &RunConfig, sys: &AnySystem) -> Result<(AnalyzeResults, Vec<String>), CliError> {
    let weights = cfg.weights();
    let h = entropy(&weights);
    let chi = on_system!(sys, s => lyapunov(s, &weights)).map_err(Error::from)?;
    let est = estimate(cfg, sys)?;
    let mut warnings = est.warnings.clone();
    let closed = closed_forms(cfg, sys);
    let lower = lower_bounds(cfg, sys)?;
    warnings.extend(lower.warnings.iter().cloned());

    let headline = match closed.first() {
        Some(t) => t.as_log_overlap(),
        None => LogOverlap {
            value: est.log_estimate.max(0.0),
            stderr: Some(est.log_stderr),
            provenance: Provenance::SlopeEstimate,
            source: "slope_estimate".into(),
        },
    };
    let dimension = on_system!(sys, s => DimensionReport::new(s, &weights, headline))?;
    warnings.extend(dimension.warnings.iter().cloned());
    let best_lower = lower.bounds.iter().map(|t| t.log_o).max_by(f64::total_cmp);
    let box_bound_from_lower_bound = match best_lower {
        Some(l) => Some(box_dimension_bound(h, l, chi.abs)?.value),
        None => None,
    };

    let results = AnalyzeResults {
        system: summary(cfg, sys),
        entropy: h,
        lyapunov: chi,
        blocks: blocks_of(sys),
        o_estimate: est.estimate,
        o_stderr: est.estimate * est.log_stderr,
        overlap: est,
        closed_forms: closed,
        lower_bounds: lower.bounds,
        spectrum: lower.spectrum,
        families: lower.families.map(|(f, _)| f),
        box_bound: dimension.box_bound,
        hd_bound: dimension.hd_bound_t,
        dimension,
        box_bound_from_lower_bound,
    };
    Ok((results, warnings))
}

#[derive(Debug, Serialize)]
pub struct LevelBlocks {
    pub p: usize,
    pub blocks: BlockStructure,
    pub closed_form: Option<Tagged>,
}

#[derive(Debug, Serialize)]
pub struct StructureResults {
    pub blocks: BlockStructure,
    pub closed_form: Option<Tagged>,
    pub level_p: Option<LevelBlocks>,
    /// Per symbol: in-fiber weights of the symbol's block.
    pub fiber_weights: Option<Vec<Vec<f64>>>,
    pub folding_entropy: Option<Tagged>,
    pub families: Vec<OverlapFamily>,
    pub family_bound: FamilyBound,
    pub family_bound_tagged: Tagged,
    /// Box-dimension bound for uniform weights from the selected families.
    pub family_box_bound: Option<f64>,
}

fn structure(cfg: &RunConfig, sys: &AnySystem) -> Result<(StructureResults, Vec<String>), CliError> {
    let bs = blocks_of(sys);
    let m = sys.alphabet_size();
    let closed_form =
        block_log_overlap_number(&bs).ok().map(|l| Tagged::new("block_closed_form", Provenance::ClosedForm, l));
    let level_p = if cfg.structure.p > 1 {
        let needed = (m as u128).checked_pow(cfg.structure.p as u32).unwrap_or(u128::MAX);
        if needed > cfg.structure.budget as u128 {
            return Err(Error::Budget { budget: cfg.structure.budget, needed }.into());
        }
        let blocks = on_system!(sys, s => s.iterate(cfg.structure.p).map(|it| detect_blocks(&it))).map_err(Error::from)?;
        let closed = block_log_overlap_number(&blocks).ok().map(|l| {
            Tagged::new("level_p_block_closed_form", Provenance::ClosedForm, l / cfg.structure.p as f64)
        });
        Some(LevelBlocks { p: cfg.structure.p, blocks, closed_form: closed })
    } else {
        None
    };
    let weights = cfg.weights();
    let fiber_weights = bs
        .osc_between_blocks
        .then(|| (0..m).map(|i| fiber_weights_block(&bs, &weights, i).map(|f| f.weights)).collect::<Result<Vec<_>, _>>())
        .transpose()?;
    let folding = folding_entropy(&bs, &weights)
        .ok()
        .map(|f| Tagged::new("block_folding_entropy", Provenance::ClosedForm, f));
    let (fams, bound) = families(cfg, sys)?;
    let chi_uniform = on_system!(sys, s => lyapunov(s, &BernoulliWeights::uniform(m))).map_err(Error::from)?.abs;
    let selected: Vec<OverlapFamily> = bound.selected.iter().map(|&i| fams[i].clone()).collect();
    let family_box_bound = cor_o2_bound(m, cfg.structure.p, &selected, (m as f64).ln(), chi_uniform).ok();
    let results = StructureResults {
        blocks: bs,
        closed_form,
        level_p,
        fiber_weights,
        folding_entropy: folding,
        family_bound_tagged: Tagged::new("family_bound_per_symbol", Provenance::LowerBound, bound.log_per_symbol),
        families: fams,
        family_bound: bound,
        family_box_bound,
    };
    Ok((results, Vec::new()))
}

fn resolve_log_o(cfg: &RunConfig, sys: &AnySystem) -> Result<LogOverlap, CliError> {
    match cfg.log_o.as_str() {
        "from:estimate" => {
            let est = estimate(cfg, sys)?;
            Ok(LogOverlap {
                value: est.log_estimate.max(0.0),
                stderr: Some(est.log_stderr),
                provenance: Provenance::SlopeEstimate,
                source: "slope_estimate".into(),
            })
        }
        "from:blocks" => {
            let f = folding_entropy(&blocks_of(sys), &cfg.weights())?;
            Ok(Tagged::new("block_folding_entropy", Provenance::ClosedForm, f).as_log_overlap())
        }
        "from:closed-form" => closed_forms(cfg, sys)
            .first()
            .map(Tagged::as_log_overlap)
            .ok_or_else(|| CliError::Lib(Error::Unsupported("no closed form applies to this system".into()))),
        "from:families" => {
            let (_, bound) = families(cfg, sys)?;
            Ok(Tagged::new("family_bound_per_symbol", Provenance::LowerBound, bound.log_per_symbol).as_log_overlap())
        }
        text => {
            let value: f64 = text
                .parse()
                .map_err(|_| CliError::Config(format!("--log-o: expected from:<source> or a number, got {text:?}")))?;
            if !(value >= 0.0) || !value.is_finite() {
                return Err(CliError::Config(format!("--log-o must be finite and non-negative, got {value}")));
            }
            Ok(LogOverlap { value, stderr: None, provenance: Provenance::UserSupplied, source: "user".into() })
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub parameter: String,
    pub o_estimate: Option<f64>,
    pub o_stderr: Option<f64>,
    pub log_o: Option<f64>,
    pub box_bound: Option<f64>,
    pub hd_bound: Option<f64>,
    pub status: &'static str,
    pub message: String,
}

enum GridPoint {
    Float(f64),
    Minpoly(MinpolySpec),
}

fn sweep(cfg: &RunConfig) -> Result<(Vec<SweepRow>, Vec<String>), CliError> {
    let mut warnings = Vec::new();
    let eps = cfg.sweep.collision_eps.unwrap_or(match cfg.parameter {
        ParameterChoice::Float { collision_eps, .. } => collision_eps,
        _ => crate::scalar::DEFAULT_COLLISION_EPS,
    });
    let mut points: Vec<GridPoint> = Vec::new();
    if let Some(grid) = &cfg.sweep_lambda {
        for &l in grid {
            if points.iter().any(|p| matches!(p, GridPoint::Float(x) if *x == l)) {
                warnings.push(format!("duplicate grid point {l} dropped"));
            } else {
                points.push(GridPoint::Float(l));
            }
        }
    }
    for spec in cfg.sweep.minpolys.iter().flatten() {
        if points.iter().any(|p| matches!(p, GridPoint::Minpoly(s) if s == spec)) {
            warnings.push("duplicate minimal polynomial dropped".into());
        } else {
            points.push(GridPoint::Minpoly(spec.clone()));
        }
    }
    if points.is_empty() {
        return Err(CliError::Config("sweep needs --lambda or [sweep] lambda / minpolys".into()));
    }
    let rows: Vec<(SweepRow, Vec<String>)> = points
        .par_iter()
        .enumerate()
        .map(|(index, point)| {
            let choice = match point {
                GridPoint::Float(l) => ParameterChoice::float(*l, eps),
                GridPoint::Minpoly(s) => ParameterChoice::from_spec(&super::config::ParameterSpec {
                    minpoly: Some(s.minpoly.clone()),
                    root_interval: Some(s.root_interval.clone()),
                    value: None,
                    collision_eps: None,
                }),
            };
            let label = match (&choice, point) {
                (Ok(c), _) => c.label(),
                (Err(_), GridPoint::Float(l)) => l.to_string(),
                (Err(_), GridPoint::Minpoly(s)) => format!("{:?}", s.minpoly),
            };
            match choice.and_then(|c| sweep_point(cfg, &c, index)) {
                Ok((o, stderr, log_o, bb, hd, w)) => (
                    SweepRow {
                        index,
                        parameter: label,
                        o_estimate: Some(o),
                        o_stderr: Some(stderr),
                        log_o: Some(log_o),
                        box_bound: Some(bb),
                        hd_bound: Some(hd),
                        status: if w.is_empty() { "ok" } else { "warning" },
                        message: w.join("; "),
                    },
                    w,
                ),
                Err(e) => (
                    SweepRow {
                        index,
                        parameter: label,
                        o_estimate: None,
                        o_stderr: None,
                        log_o: None,
                        box_bound: None,
                        hd_bound: None,
                        status: "error",
                        message: e.to_string(),
                    },
                    Vec::new(),
                ),
            }
        })
        .collect();
    let mut out = Vec::with_capacity(rows.len());
    for (row, w) in rows {
        warnings.extend(w.into_iter().map(|w| format!("point {}: {w}", row.index)));
        out.push(row);
    }
    Ok((out, warnings))
}

type PointResult = (f64, f64, f64, f64, f64, Vec<String>);

fn sweep_point(cfg: &RunConfig, choice: &ParameterChoice, index: usize) -> Result<PointResult, CliError> {
    let sys = build_system(&cfg.system, choice)?;
    let m = sys.alphabet_size();
    let weights = if cfg.weights_uniform {
        BernoulliWeights::uniform(m)
    } else {
        cfg.weights()
    };
    weights.check_alphabet(m).map_err(Error::from)?;
    let params = OverlapParams { seed: cfg.seed.wrapping_add(index as u64), ..cfg.overlap.clone() };
    let est = on_system!(&sys, s => estimate_overlap_number(s, &weights, &params))?;
    let log_o = LogOverlap {
        value: est.log_estimate.max(0.0),
        stderr: Some(est.log_stderr),
        provenance: Provenance::SlopeEstimate,
        source: "slope_estimate".into(),
    };
    let dim = on_system!(&sys, s => DimensionReport::new(s, &weights, log_o))?;
    let mut warnings = est.warnings.clone();
    warnings.extend(dim.warnings.iter().cloned());
    Ok((est.estimate, est.estimate * est.log_stderr, est.log_estimate, dim.box_bound, dim.hd_bound_t, warnings))
}
