//! Run configuration: the TOML schema, command-line overrides, validation
//! and construction of the system to analyze.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::algebraic::{parse_rational, AlgebraicParameter, RingElement};
use crate::ifs::{AffineContraction, AffineSystem};
use crate::measures::BernoulliWeights;
use crate::overlap::estimate::{FitWindow, OverlapParams, DEFAULT_TAU};
use crate::overlap::spectrum::DEFAULT_NODE_BUDGET;
use crate::scalar::{FloatScalar, DEFAULT_COLLISION_EPS};
use crate::structure::DEFAULT_GROUPING_THRESHOLD;

use super::CliError;

/// A number written as an integer, a float or a string such as `"3/10"`.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    fn rational(&self) -> Result<num_rational::BigRational, CliError> {
        let text = match self {
            Number::Int(i) => i.to_string(),
            // Shortest round-trip form, so `0.3` means 3/10.
            Number::Float(f) => format!("{f:?}"),
            Number::Text(s) => s.clone(),
        };
        parse_rational(&text).map_err(|e| CliError::Config(format!("bad number {text:?}: {e}")))
    }

    fn float(&self) -> Result<f64, CliError> {
        match self {
            Number::Int(i) => Ok(*i as f64),
            Number::Float(f) => Ok(*f),
            Number::Text(_) => self.rational()?.to_f64().ok_or_else(|| CliError::Config("number out of range".into())),
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Int(i) => write!(f, "{i}"),
            Number::Float(x) => write!(f, "{x:?}"),
            Number::Text(s) => write!(f, "{s}"),
        }
    }
}

/// A field element: a single number, or coefficients `[a0, a1, …]` of
/// `a0 + a1 λ + …`.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum ElementSpec {
    Scalar(Number),
    Coefficients(Vec<Number>),
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub ratio: ElementSpec,
    pub offset: ElementSpec,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    #[serde(default)]
    pub bernoulli_convolution: bool,
    pub maps: Option<Vec<MapSpec>>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterSpec {
    pub minpoly: Option<Vec<Number>>,
    pub root_interval: Option<[Number; 2]>,
    pub value: Option<f64>,
    pub collision_eps: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum WeightsSpec {
    Named(String),
    Values(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum ListSpec<T> {
    Range(String),
    List(Vec<T>),
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    pub depth: Option<usize>,
    pub budget: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct StructureSection {
    pub p: Option<usize>,
    pub kmax: Option<usize>,
    pub threshold: Option<f64>,
    pub budget: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct EmpdimSection {
    pub samples: Option<usize>,
    pub scales: Option<ListSpec<u32>>,
    pub fit: Option<[u32; 2]>,
    pub mass: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BoundSection {
    pub log_o: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MinpolySpec {
    pub minpoly: Vec<Number>,
    pub root_interval: [Number; 2],
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub lambda: Option<ListSpec<f64>>,
    pub minpolys: Option<Vec<MinpolySpec>>,
    pub collision_eps: Option<f64>,
}

/// The configuration file as written.
#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub depths: Option<ListSpec<usize>>,
    pub weights: Option<WeightsSpec>,
    pub tau: Option<Number>,
    pub extra_symbols: Option<usize>,
    pub max_retries: Option<usize>,
    #[serde(default)]
    pub parameter: ParameterSpec,
    #[serde(default)]
    pub system: SystemSpec,
    #[serde(default)]
    pub spectrum: SpectrumSection,
    #[serde(default)]
    pub structure: StructureSection,
    #[serde(default)]
    pub empdim: EmpdimSection,
    #[serde(default)]
    pub bound: BoundSection,
    #[serde(default)]
    pub sweep: SweepSection,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// The contraction parameter in resolved form.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ParameterChoice {
    /// Exact arithmetic over ℚ; maps may only use rational numbers.
    Rational,
    Algebraic { minpoly: Vec<String>, root_interval: [String; 2] },
    Float { value: f64, collision_eps: f64 },
}

impl ParameterChoice {
    pub fn from_spec(spec: &ParameterSpec) -> Result<Self, CliError> {
        match (&spec.minpoly, &spec.root_interval, spec.value) {
            (None, None, None) => {
                if spec.collision_eps.is_some() {
                    return Err(CliError::Config("collision_eps needs a float `value`".into()));
                }
                Ok(ParameterChoice::Rational)
            }
            (Some(poly), Some(iv), None) => {
                if spec.collision_eps.is_some() {
                    return Err(CliError::Config("collision_eps applies only to a float `value`".into()));
                }
                Ok(ParameterChoice::Algebraic {
                    minpoly: poly.iter().map(Number::to_string).collect(),
                    root_interval: [iv[0].to_string(), iv[1].to_string()],
                })
            }
            (None, None, Some(value)) => Self::float(value, spec.collision_eps.unwrap_or(DEFAULT_COLLISION_EPS)),
            _ => Err(CliError::Config(
                "parameter needs either `minpoly` with `root_interval`, or `value`".into(),
            )),
        }
    }

    pub fn float(value: f64, collision_eps: f64) -> Result<Self, CliError> {
        if !value.is_finite() {
            return Err(CliError::Config(format!("parameter value {value} is not finite")));
        }
        if !(collision_eps > 0.0) {
            return Err(CliError::Config(format!("collision_eps must be positive, got {collision_eps}")));
        }
        Ok(ParameterChoice::Float { value, collision_eps })
    }

    pub fn label(&self) -> String {
        match self {
            ParameterChoice::Rational => "rational".into(),
            ParameterChoice::Algebraic { minpoly, root_interval } => {
                format!("minpoly [{}] root in [{}, {}]", minpoly.join(", "), root_interval[0], root_interval[1])
            }
            ParameterChoice::Float { value, .. } => format!("{value}"),
        }
    }
}

/// A system in exact or float arithmetic.
#[derive(Clone, Debug)]
pub enum AnySystem {
    Exact(AffineSystem<RingElement>),
    Float(AffineSystem<FloatScalar>),
}

/// Runs an expression generic over the scalar type on either variant.
macro_rules! on_system {
    ($sys:expr, $s:ident => $body:expr) => {
        match $sys {
            $crate::cli::config::AnySystem::Exact($s) => $body,
            $crate::cli::config::AnySystem::Float($s) => $body,
        }
    };
}
pub(crate) use on_system;

impl AnySystem {
    pub fn alphabet_size(&self) -> usize {
        on_system!(self, s => s.alphabet_size())
    }

    pub fn exact(&self) -> Option<&AffineSystem<RingElement>> {
        match self {
            AnySystem::Exact(s) => Some(s),
            AnySystem::Float(_) => None,
        }
    }
}

pub fn build_parameter(choice: &ParameterChoice) -> Result<Option<Arc<AlgebraicParameter>>, CliError> {
    match choice {
        ParameterChoice::Rational => Ok(Some(AlgebraicParameter::rationals())),
        ParameterChoice::Algebraic { minpoly, root_interval } => {
            let coeffs = minpoly
                .iter()
                .map(|c| c.parse::<BigInt>().map_err(|_| CliError::Config(format!("minpoly coefficient {c:?} is not an integer"))))
                .collect::<Result<Vec<_>, _>>()?;
            let lo = Number::Text(root_interval[0].clone()).rational()?;
            let hi = Number::Text(root_interval[1].clone()).rational()?;
            AlgebraicParameter::new(coeffs, lo, hi)
                .map(Some)
                .map_err(|e| CliError::Config(format!("invalid parameter: {e}")))
        }
        ParameterChoice::Float { .. } => Ok(None),
    }
}

pub fn build_system(spec: &SystemSpec, choice: &ParameterChoice) -> Result<AnySystem, CliError> {
    let maps = match (&spec.maps, spec.bernoulli_convolution) {
        (Some(_), true) => {
            return Err(CliError::Config("system: give either `bernoulli_convolution` or `maps`, not both".into()))
        }
        (None, false) => return Err(CliError::Config("system: no maps given".into())),
        (Some(maps), false) if maps.is_empty() => return Err(CliError::Config("system: maps list is empty".into())),
        (Some(maps), false) => Some(maps),
        (None, true) => None,
    };
    let system = match build_parameter(choice)? {
        Some(param) => {
            let element = |e: &ElementSpec| exact_element(&param, e);
            let sys = match maps {
                None => {
                    if param.degree() == 1 {
                        return Err(CliError::Config(
                            "bernoulli_convolution needs a parameter (minpoly or value)".into(),
                        ));
                    }
                    AffineSystem::bernoulli_convolution(param.generator())
                }
                Some(maps) => AffineSystem::new(
                    maps.iter()
                        .map(|m| Ok(AffineContraction::new(element(&m.ratio)?, element(&m.offset)?)))
                        .collect::<Result<Vec<_>, CliError>>()?,
                ),
            };
            AnySystem::Exact(sys.map_err(|e| CliError::Config(format!("system: {e}")))?)
        }
        None => {
            let ParameterChoice::Float { value, collision_eps } = *choice else { unreachable!() };
            let element = |e: &ElementSpec| float_element(value, e).map(|v| FloatScalar::new(v, collision_eps));
            let sys = match maps {
                None => AffineSystem::bernoulli_convolution(FloatScalar::new(value, collision_eps)),
                Some(maps) => AffineSystem::new(
                    maps.iter()
                        .map(|m| Ok(AffineContraction::new(element(&m.ratio)?, element(&m.offset)?)))
                        .collect::<Result<Vec<_>, CliError>>()?,
                ),
            };
            AnySystem::Float(sys.map_err(|e| CliError::Config(format!("system: {e}")))?)
        }
    };
    Ok(system)
}

fn exact_element(param: &Arc<AlgebraicParameter>, spec: &ElementSpec) -> Result<RingElement, CliError> {
    match spec {
        ElementSpec::Scalar(n) => Ok(param.rational(n.rational()?)),
        ElementSpec::Coefficients(cs) => {
            let coeffs = cs.iter().map(Number::rational).collect::<Result<Vec<_>, _>>()?;
            param
                .element_exact_len(coeffs)
                .map_err(|e| CliError::Config(format!("bad element: {e}")))
        }
    }
}

fn float_element(lambda: f64, spec: &ElementSpec) -> Result<f64, CliError> {
    match spec {
        ElementSpec::Scalar(n) => n.float(),
        ElementSpec::Coefficients(cs) => {
            let coeffs = cs.iter().map(Number::float).collect::<Result<Vec<_>, _>>()?;
            Ok(coeffs.iter().rev().fold(0.0, |acc, c| acc * lambda + c))
        }
    }
}

/// Parses `a:b:c` (inclusive, step `c`), `a:b` (step 1) or a single value.
pub fn parse_int_range<T>(text: &str) -> Result<Vec<T>, CliError>
where
    T: TryFrom<u64>,
{
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let num = |s: &str| s.parse::<u64>().map_err(|_| CliError::Config(format!("bad range {text:?}")));
    let (start, end, step) = match parts.as_slice() {
        [a] => (num(a)?, num(a)?, 1),
        [a, b] => (num(a)?, num(b)?, 1),
        [a, b, c] => (num(a)?, num(b)?, num(c)?),
        _ => return Err(CliError::Config(format!("bad range {text:?}"))),
    };
    if step == 0 || end < start {
        return Err(CliError::Config(format!("bad range {text:?}")));
    }
    (start..=end)
        .step_by(step as usize)
        .map(|v| T::try_from(v).map_err(|_| CliError::Config(format!("range value {v} out of bounds"))))
        .collect()
}

/// Float grid `a:b:c`, inclusive of `b` up to rounding.
pub fn parse_float_range(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Config(format!("bad range {text:?}"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [a] => Ok(vec![*a]),
        [a, b, c] if *c > 0.0 && b >= a => {
            let count = ((b - a) / c + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| round12(a + i as f64 * c)).collect())
        }
        _ => Err(bad()),
    }
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

fn resolve_list<T: Clone + TryFrom<u64>>(spec: &ListSpec<T>) -> Result<Vec<T>, CliError> {
    match spec {
        ListSpec::Range(s) => parse_int_range(s),
        ListSpec::List(v) => Ok(v.clone()),
    }
}

/// Command-line values that override the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub depths: Option<String>,
    pub tau: Option<String>,
    pub spectrum_depth: Option<usize>,
    pub budget: Option<u64>,
    pub p: Option<usize>,
    pub kmax: Option<usize>,
    pub threshold: Option<f64>,
    pub log_o: Option<String>,
    pub empdim_samples: Option<usize>,
    pub scales: Option<String>,
    pub mass: Option<f64>,
    pub lambda: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpdimSettings {
    pub samples: usize,
    pub scale_exponents: Vec<u32>,
    pub fit: Option<[u32; 2]>,
    pub mass_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureSettings {
    pub p: usize,
    pub kmax: usize,
    pub threshold: f64,
    pub budget: u64,
}

/// Every value that can affect a result, after defaults and overrides.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub parameter: ParameterChoice,
    pub system: SystemSpec,
    pub weights: Vec<f64>,
    pub weights_uniform: bool,
    pub seed: u64,
    pub overlap: OverlapParams,
    pub spectrum_depth: usize,
    pub spectrum_budget: u64,
    pub structure: StructureSettings,
    pub empdim: EmpdimSettings,
    pub log_o: String,
    pub sweep: SweepSection,
    /// Resolved float grid for `sweep`.
    pub sweep_lambda: Option<Vec<f64>>,
}

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_SAMPLES: usize = 2000;
pub const DEFAULT_DEPTHS: &str = "4:16:2";
pub const DEFAULT_SPECTRUM_DEPTH: usize = 12;
pub const DEFAULT_EMPDIM_SAMPLES: usize = 2_000_000;

impl RunConfig {
    pub fn resolve(file: &ConfigFile, o: &Overrides) -> Result<(Self, AnySystem), CliError> {
        let parameter = ParameterChoice::from_spec(&file.parameter)?;
        let system = build_system(&file.system, &parameter)?;
        let m = system.alphabet_size();

        let weights = match &file.weights {
            None => BernoulliWeights::uniform(m),
            Some(WeightsSpec::Named(s)) if s == "uniform" => BernoulliWeights::uniform(m),
            Some(WeightsSpec::Named(s)) => return Err(CliError::Config(format!("unknown weights {s:?}"))),
            Some(WeightsSpec::Values(v)) => {
                let w = BernoulliWeights::new(v.clone()).map_err(|e| CliError::Config(format!("weights: {e}")))?;
                w.check_alphabet(m).map_err(|e| CliError::Config(format!("weights: {e}")))?;
                w
            }
        };

        let seed = o.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
        let samples = o.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES);
        let depths = match (&o.depths, &file.depths) {
            (Some(s), _) => parse_int_range(s)?,
            (None, Some(spec)) => resolve_list(spec)?,
            (None, None) => parse_int_range(DEFAULT_DEPTHS)?,
        };
        if depths.is_empty() || depths[0] == 0 || depths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config(format!("depths must be positive and increasing, got {depths:?}")));
        }
        if samples == 0 {
            return Err(CliError::Config("samples must be at least 1".into()));
        }
        let tau = match (&o.tau, &file.tau) {
            (Some(s), _) => parse_tau(&Number::Text(s.clone()))?,
            (None, Some(n)) => parse_tau(n)?,
            (None, None) if weights.is_uniform() => f64::INFINITY,
            (None, None) => DEFAULT_TAU,
        };
        let mut overlap = OverlapParams::new(depths, samples, seed);
        overlap.tau = tau;
        overlap.extra_symbols = file.extra_symbols;
        if let Some(r) = file.max_retries {
            overlap.max_retries = r;
        }
        overlap.fit = FitWindow::TopHalf;

        let spectrum_depth = o.spectrum_depth.or(file.spectrum.depth).unwrap_or(DEFAULT_SPECTRUM_DEPTH);
        let spectrum_budget = o.budget.or(file.spectrum.budget).unwrap_or(DEFAULT_NODE_BUDGET);
        if spectrum_depth == 0 {
            return Err(CliError::Config("spectrum depth must be positive".into()));
        }

        let structure = StructureSettings {
            p: o.p.or(file.structure.p).unwrap_or(1),
            kmax: o.kmax.or(file.structure.kmax).unwrap_or(0),
            threshold: o.threshold.or(file.structure.threshold).unwrap_or(DEFAULT_GROUPING_THRESHOLD),
            budget: o.budget.or(file.structure.budget).unwrap_or(DEFAULT_NODE_BUDGET),
        };
        if structure.p == 0 || !(structure.threshold > 0.0 && structure.threshold <= 1.0) {
            return Err(CliError::Config("structure needs p >= 1 and threshold in (0, 1]".into()));
        }

        let scale_exponents = match (&o.scales, &file.empdim.scales) {
            (Some(s), _) => parse_int_range(s)?,
            (None, Some(spec)) => resolve_list(spec)?,
            (None, None) => (4..=14).collect(),
        };
        let empdim = EmpdimSettings {
            samples: o.empdim_samples.or(file.empdim.samples).unwrap_or(DEFAULT_EMPDIM_SAMPLES),
            scale_exponents,
            fit: file.empdim.fit,
            mass_fraction: o.mass.or(file.empdim.mass).unwrap_or(0.95),
        };
        if !(empdim.mass_fraction > 0.5 && empdim.mass_fraction < 1.0) {
            return Err(CliError::Config(format!("mass must lie in (0.5, 1), got {}", empdim.mass_fraction)));
        }
        if empdim.samples == 0 || empdim.scale_exponents.len() < 2 || empdim.scale_exponents.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config("empdim needs samples >= 1 and at least two increasing scales".into()));
        }

        let log_o = o.log_o.clone().or_else(|| file.bound.log_o.clone()).unwrap_or_else(|| "from:estimate".into());
        let sweep_lambda = match (&o.lambda, &file.sweep.lambda) {
            (Some(s), _) => Some(parse_float_range(s)?),
            (None, Some(ListSpec::Range(s))) => Some(parse_float_range(s)?),
            (None, Some(ListSpec::List(v))) => Some(v.clone()),
            (None, None) => None,
        };

        let config = RunConfig {
            parameter,
            system: file.system.clone(),
            weights_uniform: weights.is_uniform(),
            weights: weights.probabilities().to_vec(),
            seed,
            overlap,
            spectrum_depth,
            spectrum_budget,
            structure,
            empdim,
            log_o,
            sweep: file.sweep.clone(),
            sweep_lambda,
        };
        Ok((config, system))
    }

    pub fn weights(&self) -> BernoulliWeights {
        if self.weights_uniform {
            BernoulliWeights::uniform(self.weights.len())
        } else {
            BernoulliWeights::new(self.weights.clone()).expect("validated at resolution")
        }
    }
}

fn parse_tau(n: &Number) -> Result<f64, CliError> {
    let tau = match n {
        Number::Text(s) if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") => f64::INFINITY,
        Number::Text(s) => s.parse::<f64>().map_err(|_| CliError::Config(format!("bad tau {s:?}")))?,
        other => other.float()?,
    };
    if tau.is_nan() || tau <= 0.0 {
        return Err(CliError::Config(format!("tau must be positive or inf, got {tau}")));
    }
    Ok(tau)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_int_range::<usize>("4:24:2").unwrap(), vec![4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24]);
        assert_eq!(parse_int_range::<u32>("4:7").unwrap(), vec![4, 5, 6, 7]);
        assert!(parse_int_range::<usize>("5:4").is_err());
        let grid = parse_float_range("0.50:0.70:0.02").unwrap();
        assert_eq!(grid.len(), 11);
        assert_eq!(grid[10], 0.7);
        assert_eq!(grid[1], 0.52);
    }

    #[test]
    fn resolves_garsia_config() {
        let file = ConfigFile::parse(
            r#"
            seed = 3
            depths = "6:10:2"
            [parameter]
            minpoly = [-1, 0, 2]
            root_interval = ["1/2", "1"]
            [system]
            bernoulli_convolution = true
            "#,
        )
        .unwrap();
        let (cfg, sys) = RunConfig::resolve(&file, &Overrides::default()).unwrap();
        assert_eq!(cfg.overlap.depths, vec![6, 8, 10]);
        assert_eq!(cfg.overlap.tau, f64::INFINITY);
        assert!(sys.exact().is_some());
    }

    #[test]
    fn rational_maps_from_floats_are_exact() {
        let file = ConfigFile::parse(
            r#"
            [[system.maps]]
            ratio = 0.3
            offset = 0
            [[system.maps]]
            ratio = "3/10"
            offset = 0.7
            "#,
        )
        .unwrap();
        let (_, sys) = RunConfig::resolve(&file, &Overrides::default()).unwrap();
        let sys = sys.exact().unwrap().clone();
        assert!(sys.maps()[0].ratio == sys.maps()[1].ratio);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "[system]\nmaps = []",
            "[system]\nbernoulli_convolution = true",
            "[parameter]\nvalue = 0.5\nminpoly = [1, 2]\n[system]\nbernoulli_convolution = true",
            "[parameter]\nvalue = 0.5\n[system]\nbernoulli_convolution = true\nunknown = 1",
            "[parameter]\nvalue = 1.5\n[system]\nbernoulli_convolution = true",
            "weights = [0.5, 0.6]\n[parameter]\nvalue = 0.5\n[system]\nbernoulli_convolution = true",
        ] {
            let result = ConfigFile::parse(text).and_then(|f| RunConfig::resolve(&f, &Overrides::default()));
            assert!(matches!(result, Err(CliError::Config(_))), "{text}");
        }
    }
}
