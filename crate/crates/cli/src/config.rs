//! Scenario configuration files.
//!
//! Configs are TOML documents:
//!
//! ```toml
//! kind = "counterexample"        # bound_check | qfi_sweep | distance_table | counterexample | saturating_demo
//! seed = 0                       # optional, default 0
//! output_path = "out/report.json"
//! curve_path = "out/curve.csv"   # optional; bound_check and saturating_demo only
//! hbar = 1.0                     # optional, default 1.0
//! convention = "wootters_angle"  # optional: wootters_angle | fisher_angle
//!
//! [parameters]
//! e0 = 1.0
//! eq = 3.0
//! g = 6.0
//! n = 8
//!
//! [sweep]                        # optional; only accepted by `qsl sweep`
//! parameter = "g"
//! values = [3.5, 6.0, 12.0]
//! ```
//!
//! Every kind-specific parameter is validated at parse time, once per sweep point.

use std::collections::BTreeMap;
use std::ops::Range;
use std::path::PathBuf;

use qsl_core::counterexample::CounterexampleParams;
use qsl_core::{c64, DistanceConvention, ProbDist, C64};
use serde::Deserialize;
use toml::Spanned;

use crate::error::{CliError, CliResult};

/// Upper limit on randomly sampled cases in one scenario.
pub const MAX_CASES: usize = 1_000_000;
/// Upper limit on the Hilbert-space dimension of sampled or explicit states.
pub const MAX_DIM: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    BoundCheck,
    QfiSweep,
    DistanceTable,
    Counterexample,
    SaturatingDemo,
}

impl ScenarioKind {
    pub const ALL: [Self; 5] =
        [Self::BoundCheck, Self::QfiSweep, Self::DistanceTable, Self::Counterexample, Self::SaturatingDemo];

    pub fn name(self) -> &'static str {
        match self {
            Self::BoundCheck => "bound_check",
            Self::QfiSweep => "qfi_sweep",
            Self::DistanceTable => "distance_table",
            Self::Counterexample => "counterexample",
            Self::SaturatingDemo => "saturating_demo",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    fn draws_curves(self) -> bool {
        matches!(self, Self::BoundCheck | Self::SaturatingDemo)
    }
}

/// A pure state evolving under a diagonal generator.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitSpec {
    pub levels: Vec<f64>,
    pub theta_max: Option<f64>,
    pub samples: usize,
    pub eps: f64,
}

/// Kind-specific, validated inputs of one scenario.
#[derive(Clone, Debug, PartialEq)]
pub enum Scenario {
    BoundCheck { orbit: OrbitSpec, amplitudes: Vec<C64> },
    QfiSweep { count: usize, dim_min: usize, dim_max: usize, pure_only: bool },
    DistanceTable { distributions: Vec<ProbDist>, states: Vec<Vec<C64>> },
    Counterexample(CounterexampleParams),
    SaturatingDemo { orbit: OrbitSpec, level: usize, phase: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub parameter: String,
    pub values: Vec<toml::Value>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub seed: u64,
    pub output_path: PathBuf,
    pub curve_path: Option<PathBuf>,
    pub hbar: f64,
    pub convention: DistanceConvention,
    pub parameters: toml::Table,
    pub sweep: Option<Sweep>,
    /// One entry without a sweep, otherwise one per sweep value, in order.
    pub scenarios: Vec<Scenario>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: Option<Spanned<String>>,
    seed: Option<Spanned<i64>>,
    output_path: Option<Spanned<String>>,
    curve_path: Option<Spanned<String>>,
    hbar: Option<Spanned<f64>>,
    convention: Option<Spanned<String>>,
    #[serde(default)]
    parameters: BTreeMap<String, Spanned<toml::Value>>,
    sweep: Option<Spanned<RawSweep>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    parameter: Spanned<String>,
    values: Spanned<Vec<toml::Value>>,
}

/// Byte offset to 1-based line and column.
struct Positions<'a>(&'a str);

impl Positions<'_> {
    fn at(&self, offset: usize) -> (usize, usize) {
        let before = &self.0[..offset.min(self.0.len())];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
        (line, col)
    }

    fn span(&self, span: Range<usize>) -> Option<(usize, usize)> {
        Some(self.at(span.start))
    }
}

/// Parses and validates a TOML scenario config.
pub fn parse_config(text: &str) -> CliResult<ScenarioConfig> {
    let pos = Positions(text);
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, col) = e.span().map_or((1, 1), |s| pos.at(s.start));
        CliError::Parse { line, col, message: e.message().to_string() }
    })?;

    let kind_raw = raw.kind.ok_or_else(|| CliError::validation("kind", "missing required key", None))?;
    let kind = ScenarioKind::from_name(kind_raw.get_ref()).ok_or_else(|| {
        let names: Vec<_> = ScenarioKind::ALL.iter().map(|k| k.name()).collect();
        CliError::validation(
            "kind",
            format!("unknown kind `{}`, expected one of {}", kind_raw.get_ref(), names.join(", ")),
            pos.span(kind_raw.span()),
        )
    })?;

    let seed = match raw.seed {
        None => 0,
        Some(s) => u64::try_from(*s.get_ref())
            .map_err(|_| CliError::validation("seed", "must be a nonnegative integer", pos.span(s.span())))?,
    };
    let output_path = raw
        .output_path
        .map(|p| PathBuf::from(p.into_inner()))
        .ok_or_else(|| CliError::validation("output_path", "missing required key", None))?;
    let hbar = match raw.hbar {
        None => 1.0,
        Some(h) if h.get_ref().is_finite() && *h.get_ref() > 0.0 => *h.get_ref(),
        Some(h) => return Err(CliError::validation("hbar", "must be positive and finite", pos.span(h.span()))),
    };
    let convention = match raw.convention {
        None => DistanceConvention::default(),
        Some(c) => match c.get_ref().as_str() {
            "wootters_angle" => DistanceConvention::WoottersAngle,
            "fisher_angle" => DistanceConvention::FisherAngle,
            other => {
                return Err(CliError::validation(
                    "convention",
                    format!("unknown convention `{other}`, expected wootters_angle or fisher_angle"),
                    pos.span(c.span()),
                ))
            }
        },
    };
    let curve_path = match raw.curve_path {
        None => None,
        Some(_) if !kind.draws_curves() => {
            return Err(CliError::validation("curve_path", format!("{} produces no curve", kind.name()), None))
        }
        Some(p) => Some(PathBuf::from(p.into_inner())),
    };

    let base = Params { values: raw.parameters, pos: &pos, sweep_override: None };
    let parameters: toml::Table = base.values.iter().map(|(k, v)| (k.clone(), v.get_ref().clone())).collect();

    let (sweep, scenarios) = match raw.sweep {
        None => (None, vec![build_scenario(kind, &base)?]),
        Some(s) => {
            let s = s.into_inner();
            let name = s.parameter.get_ref().clone();
            let values = s.values.get_ref().clone();
            if values.is_empty() {
                return Err(CliError::validation("sweep.values", "needs at least one value", pos.span(s.values.span())));
            }
            if curve_path.is_some() {
                return Err(CliError::validation("curve_path", "curves are not written for sweeps", None));
            }
            if !kind_parameters(kind).contains(&name.as_str()) {
                return Err(CliError::validation(
                    "sweep.parameter",
                    format!("`{name}` is not a parameter of {}", kind.name()),
                    pos.span(s.parameter.span()),
                ));
            }
            let scenarios = values
                .iter()
                .map(|v| {
                    let point = Params {
                        values: base.values.clone(),
                        pos: &pos,
                        sweep_override: Some((name.clone(), v.clone(), s.values.span())),
                    };
                    build_scenario(kind, &point)
                })
                .collect::<CliResult<Vec<_>>>()?;
            (Some(Sweep { parameter: name, values }), scenarios)
        }
    };

    Ok(ScenarioConfig { kind, seed, output_path, curve_path, hbar, convention, parameters, sweep, scenarios })
}

fn kind_parameters(kind: ScenarioKind) -> &'static [&'static str] {
    match kind {
        ScenarioKind::BoundCheck => &["levels", "amplitudes", "theta_max", "samples", "eps"],
        ScenarioKind::QfiSweep => &["count", "dim_min", "dim_max", "pure_only"],
        ScenarioKind::DistanceTable => &["distributions", "states"],
        ScenarioKind::Counterexample => &["e0", "eq", "g", "n", "phi", "t_phi"],
        ScenarioKind::SaturatingDemo => &["levels", "level", "phase", "theta_max", "samples", "eps"],
    }
}

/// Parameter table of one scenario, with an optional swept value substituted.
struct Params<'a> {
    values: BTreeMap<String, Spanned<toml::Value>>,
    pos: &'a Positions<'a>,
    sweep_override: Option<(String, toml::Value, Range<usize>)>,
}

impl Params<'_> {
    fn lookup(&self, key: &str) -> Option<(&toml::Value, Option<(usize, usize)>)> {
        if let Some((name, value, span)) = &self.sweep_override {
            if name == key {
                return Some((value, self.pos.span(span.clone())));
            }
        }
        self.values.get(key).map(|v| (v.get_ref(), self.pos.span(v.span())))
    }

    fn key(key: &str) -> String {
        format!("parameters.{key}")
    }

    fn require(&self, key: &str) -> CliResult<(&toml::Value, Option<(usize, usize)>)> {
        self.lookup(key).ok_or_else(|| CliError::validation(Self::key(key), "missing required key", None))
    }

    fn invalid(key: &str, message: impl Into<String>, at: Option<(usize, usize)>) -> CliError {
        CliError::validation(Self::key(key), message, at)
    }

    fn check_known(&self, kind: ScenarioKind) -> CliResult<()> {
        let known = kind_parameters(kind);
        match self.values.iter().find(|(k, _)| !known.contains(&k.as_str())) {
            Some((k, v)) => Err(Self::invalid(
                k,
                format!("unknown parameter for {}, expected one of {}", kind.name(), known.join(", ")),
                self.pos.span(v.span()),
            )),
            None => Ok(()),
        }
    }

    fn number(value: &toml::Value) -> Option<f64> {
        match value {
            toml::Value::Float(x) => Some(*x),
            toml::Value::Integer(i) => Some(*i as f64),
            _ => None,
        }
    }

    fn f64_or(&self, key: &str, default: Option<f64>) -> CliResult<f64> {
        match self.lookup(key) {
            None => default.ok_or_else(|| CliError::validation(Self::key(key), "missing required key", None)),
            Some((v, at)) => match Self::number(v) {
                Some(x) if x.is_finite() => Ok(x),
                _ => Err(Self::invalid(key, "expected a finite number", at)),
            },
        }
    }

    fn positive(&self, key: &str, default: Option<f64>) -> CliResult<f64> {
        let x = self.f64_or(key, default)?;
        if x > 0.0 {
            Ok(x)
        } else {
            Err(Self::invalid(key, format!("must be positive, got {x}"), self.lookup(key).and_then(|l| l.1)))
        }
    }

    fn count(&self, key: &str, default: Option<usize>, range: std::ops::RangeInclusive<usize>) -> CliResult<usize> {
        let n = match self.lookup(key) {
            None => default.ok_or_else(|| CliError::validation(Self::key(key), "missing required key", None))?,
            Some((toml::Value::Integer(i), at)) => {
                usize::try_from(*i).map_err(|_| Self::invalid(key, "must be a nonnegative integer", at))?
            }
            Some((_, at)) => return Err(Self::invalid(key, "expected an integer", at)),
        };
        if range.contains(&n) {
            Ok(n)
        } else {
            let at = self.lookup(key).and_then(|l| l.1);
            Err(Self::invalid(key, format!("{n} is outside {}..={}", range.start(), range.end()), at))
        }
    }

    fn boolean(&self, key: &str, default: bool) -> CliResult<bool> {
        match self.lookup(key) {
            None => Ok(default),
            Some((toml::Value::Boolean(b), _)) => Ok(*b),
            Some((_, at)) => Err(Self::invalid(key, "expected true or false", at)),
        }
    }

    fn reals(&self, key: &str, value: &toml::Value, at: Option<(usize, usize)>) -> CliResult<Vec<f64>> {
        let arr = value.as_array().ok_or_else(|| Self::invalid(key, "expected an array of numbers", at))?;
        arr.iter()
            .map(|v| Self::number(v).filter(|x| x.is_finite()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Self::invalid(key, "expected an array of finite numbers", at))
    }

    /// Amplitudes are numbers or `[re, im]` pairs.
    fn amplitudes(&self, key: &str, value: &toml::Value, at: Option<(usize, usize)>) -> CliResult<Vec<C64>> {
        let bad = || Self::invalid(key, "expected an array of numbers or [re, im] pairs", at);
        let arr = value.as_array().ok_or_else(bad)?;
        let amps = arr
            .iter()
            .map(|v| match v {
                toml::Value::Array(pair) if pair.len() == 2 => {
                    Some(c64(Self::number(&pair[0])?, Self::number(&pair[1])?))
                }
                other => Self::number(other).map(|x| c64(x, 0.0)),
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(bad)?;
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(bad());
        }
        if amps.iter().all(|z| z.norm_sqr() == 0.0) {
            return Err(Self::invalid(key, "state has zero norm", at));
        }
        Ok(amps)
    }

    fn levels(&self) -> CliResult<Vec<f64>> {
        let (value, at) = self.require("levels")?;
        let levels = self.reals("levels", value, at)?;
        if !(2..=MAX_DIM).contains(&levels.len()) {
            return Err(Self::invalid("levels", format!("needs between 2 and {MAX_DIM} levels"), at));
        }
        Ok(levels)
    }

    fn orbit(&self) -> CliResult<OrbitSpec> {
        let theta_max = match self.lookup("theta_max") {
            None => None,
            Some(_) => Some(self.positive("theta_max", None)?),
        };
        let eps = self.positive("eps", Some(qsl_core::speedlimit::DEFAULT_ORTHOGONALITY_EPS))?;
        if eps >= 1.0 {
            return Err(Self::invalid("eps", "must be below 1", self.lookup("eps").and_then(|l| l.1)));
        }
        Ok(OrbitSpec {
            levels: self.levels()?,
            theta_max,
            samples: self.count("samples", Some(qsl_core::speedlimit::DEFAULT_SAMPLES), 2..=1 << 20)?,
            eps,
        })
    }
}

fn build_scenario(kind: ScenarioKind, p: &Params<'_>) -> CliResult<Scenario> {
    p.check_known(kind)?;
    match kind {
        ScenarioKind::BoundCheck => {
            let orbit = p.orbit()?;
            let (value, at) = p.require("amplitudes")?;
            let amplitudes = p.amplitudes("amplitudes", value, at)?;
            if amplitudes.len() != orbit.levels.len() {
                return Err(Params::invalid(
                    "amplitudes",
                    format!("has {} entries but there are {} levels", amplitudes.len(), orbit.levels.len()),
                    at,
                ));
            }
            Ok(Scenario::BoundCheck { orbit, amplitudes })
        }
        ScenarioKind::QfiSweep => {
            let count = p.count("count", None, 1..=MAX_CASES)?;
            let dim_min = p.count("dim_min", Some(2), 2..=MAX_DIM)?;
            let dim_max = p.count("dim_max", Some(8), 2..=MAX_DIM)?;
            if dim_max < dim_min {
                let at = p.lookup("dim_max").and_then(|l| l.1);
                return Err(Params::invalid("dim_max", format!("must be at least dim_min = {dim_min}"), at));
            }
            Ok(Scenario::QfiSweep { count, dim_min, dim_max, pure_only: p.boolean("pure_only", false)? })
        }
        ScenarioKind::DistanceTable => {
            let mut distributions = Vec::new();
            if let Some((value, at)) = p.lookup("distributions") {
                let rows = value.as_array().ok_or_else(|| Params::invalid("distributions", "expected an array", at))?;
                for row in rows {
                    let probs = p.reals("distributions", row, at)?;
                    let dist = ProbDist::new(probs).map_err(|e| Params::invalid("distributions", e.to_string(), at))?;
                    distributions.push(dist);
                }
                if distributions.windows(2).any(|w| w[0].len() != w[1].len()) {
                    return Err(Params::invalid("distributions", "all distributions need the same length", at));
                }
            }
            let mut states = Vec::new();
            if let Some((value, at)) = p.lookup("states") {
                let rows = value.as_array().ok_or_else(|| Params::invalid("states", "expected an array", at))?;
                for row in rows {
                    states.push(p.amplitudes("states", row, at)?);
                }
                if states.windows(2).any(|w| w[0].len() != w[1].len()) {
                    return Err(Params::invalid("states", "all states need the same dimension", at));
                }
                if states.first().is_some_and(|s| s.len() > MAX_DIM) {
                    return Err(Params::invalid("states", format!("dimension exceeds {MAX_DIM}"), at));
                }
            }
            if distributions.is_empty() && states.is_empty() {
                return Err(CliError::validation(
                    "parameters.distributions",
                    "missing required key (give `distributions`, `states` or both)",
                    None,
                ));
            }
            Ok(Scenario::DistanceTable { distributions, states })
        }
        ScenarioKind::Counterexample => {
            let n = p.count("n", None, 1..=qsl_core::counterexample::statevector::MAX_SATELLITES)?;
            let mut params =
                CounterexampleParams::canonical(p.positive("e0", None)?, p.positive("eq", None)?, p.positive("g", None)?, n);
            params.phi = p.f64_or("phi", Some(params.phi))?;
            params.t_phi = p.f64_or("t_phi", Some(0.0))?;
            if params.t_phi < 0.0 {
                let at = p.lookup("t_phi").and_then(|l| l.1);
                return Err(Params::invalid("t_phi", "must be nonnegative", at));
            }
            params.validate().map_err(|e| CliError::validation("parameters", e.to_string(), None))?;
            Ok(Scenario::Counterexample(params))
        }
        ScenarioKind::SaturatingDemo => {
            let orbit = p.orbit()?;
            let level = p.count("level", None, 1..=orbit.levels.len() - 1)?;
            Ok(Scenario::SaturatingDemo { orbit, level, phase: p.f64_or("phase", Some(0.0))? })
        }
    }
}
