//! Executes validated scenarios and writes their reports.
//!
//! Reports are pretty-printed JSON with sorted keys. Non-finite numbers are
//! written as the strings `"inf"`, `"-inf"` and `"nan"`. Curve files are CSV
//! with the header `theta,fidelity,bures_angle_wootters,rate`.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use qsl_core::counterexample::{end_to_end_counterexample, CounterexampleReport, Verdict};
use qsl_core::distances::{bures_angle, classical_geodesic_distance, fidelity, wootters_distance};
use qsl_core::information::qfi_variance_gap;
use qsl_core::sampling::{random_density_matrix, random_hermitian, rng_for};
use qsl_core::speedlimit::{bound_report, orbit_curve, rate_bound_check, saturating_state};
use qsl_core::{
    BoundReport, CurvePoint, DistanceConvention, EvolutionScenario, Observable, PureState, QuantumState, RateReport, C64,
};
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{OrbitSpec, Scenario, ScenarioConfig};
use crate::error::{CliError, CliResult};

/// Slack on the speed-limit and QFI inequalities before a case counts as a violation.
pub const INEQUALITY_TOL: f64 = 1e-9;

pub const CURVE_HEADER: [&str; 4] = ["theta", "fidelity", "bures_angle_wootters", "rate"];

/// JSON number, with non-finite values spelled out.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub config_echo: Value,
    pub results: Vec<Value>,
    /// Failed inequalities, in scenario order; empty on a clean run.
    pub invariant_violations: Vec<String>,
    pub curve: Option<Vec<CurvePoint>>,
    pub elapsed: Duration,
}

impl RunReport {
    /// The report document. Wall time is included only on request, so that
    /// the default output is byte-identical across runs.
    pub fn to_json(&self, include_timing: bool) -> String {
        let mut doc = Map::new();
        doc.insert("tool".into(), json!("qsl"));
        doc.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        doc.insert("config".into(), self.config_echo.clone());
        doc.insert("results".into(), Value::Array(self.results.clone()));
        doc.insert("invariant_violations".into(), json!(self.invariant_violations));
        if include_timing {
            doc.insert("elapsed_seconds".into(), num(self.elapsed.as_secs_f64()));
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON values always serialize");
        text.push('\n');
        text
    }

    pub fn curve_csv(&self) -> Option<CliResult<Vec<u8>>> {
        self.curve.as_ref().map(|points| curve_csv(points))
    }
}

pub fn curve_csv(points: &[CurvePoint]) -> CliResult<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io { path: "curve".into(), source: std::io::Error::other(e) };
    w.write_record(CURVE_HEADER).map_err(io)?;
    for p in points {
        w.serialize(p).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io { path: "curve".into(), source: e.into_error() })
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io)?;
    let name = path.file_name().ok_or_else(|| io(std::io::Error::other("path has no file name")))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io)
}

/// Writes the report and, when configured, the curve file.
pub fn write_outputs(report: &RunReport, config: &ScenarioConfig, include_timing: bool) -> CliResult<()> {
    if let (Some(path), Some(csv)) = (&config.curve_path, report.curve_csv()) {
        write_atomic(path, &csv?)?;
    }
    write_atomic(&config.output_path, report.to_json(include_timing).as_bytes())
}

fn config_echo(config: &ScenarioConfig) -> Value {
    let mut echo = Map::new();
    echo.insert("kind".into(), json!(config.kind.name()));
    echo.insert("seed".into(), json!(config.seed));
    echo.insert("hbar".into(), num(config.hbar));
    echo.insert("convention".into(), serde_json::to_value(config.convention).expect("enum serializes"));
    echo.insert("output_path".into(), json!(config.output_path.to_string_lossy()));
    if let Some(p) = &config.curve_path {
        echo.insert("curve_path".into(), json!(p.to_string_lossy()));
    }
    echo.insert("parameters".into(), serde_json::to_value(&config.parameters).expect("TOML values serialize"));
    if let Some(s) = &config.sweep {
        echo.insert("sweep".into(), json!({ "parameter": s.parameter, "values": s.values }));
    }
    Value::Object(echo)
}

struct ScenarioOutcome {
    value: Value,
    violations: Vec<String>,
    curve: Option<Vec<CurvePoint>>,
}

/// Runs every scenario of the config. Sweep points execute in parallel and
/// are assembled in config order.
pub fn run(config: &ScenarioConfig) -> CliResult<RunReport> {
    let start = Instant::now();
    let outcomes: Vec<CliResult<ScenarioOutcome>> =
        config.scenarios.par_iter().enumerate().map(|(i, s)| run_scenario(config, i, s)).collect();

    let mut results = Vec::with_capacity(outcomes.len());
    let mut invariant_violations = Vec::new();
    let mut curve = None;
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let outcome = outcome?;
        let label = point_label(config, i);
        invariant_violations.extend(outcome.violations.into_iter().map(|v| format!("{label}{v}")));
        results.push(match &config.sweep {
            Some(s) => json!({ "sweep_value": s.values[i], "result": outcome.value }),
            None => outcome.value,
        });
        curve = curve.or(outcome.curve);
    }
    Ok(RunReport { config_echo: config_echo(config), results, invariant_violations, curve, elapsed: start.elapsed() })
}

fn point_label(config: &ScenarioConfig, i: usize) -> String {
    match &config.sweep {
        Some(s) => format!("{} = {}: ", s.parameter, s.values[i]),
        None => String::new(),
    }
}

fn run_scenario(config: &ScenarioConfig, index: usize, scenario: &Scenario) -> CliResult<ScenarioOutcome> {
    let context = format!("{}{}", point_label(config, index), config.kind.name());
    let core = |e| CliError::from_core(context.clone(), e);
    let hbar = config.hbar;
    match scenario {
        Scenario::BoundCheck { orbit, amplitudes } => {
            let psi = PureState::normalized(amplitudes.clone()).map_err(core)?;
            Ok(orbit_outcome(orbit, psi, config, &core)?.0)
        }
        Scenario::SaturatingDemo { orbit, level, phase } => {
            let k = Observable::diagonal(&orbit.levels).map_err(core)?;
            let psi = saturating_state(&k, *level, *phase).map_err(core)?;
            let (mut out, report) = orbit_outcome(orbit, psi, config, &core)?;
            let saturated = report.orthogonality_theta.is_some_and(|t| {
                (t - report.mt_bound).abs() <= INEQUALITY_TOL && (t - report.ml_bound_ground_referenced).abs() <= INEQUALITY_TOL
            });
            out.value["saturated"] = json!(saturated);
            if !saturated {
                out.violations.push("saturating state does not attain both bounds".into());
            }
            Ok(out)
        }
        Scenario::QfiSweep { count, dim_min, dim_max, pure_only } => {
            let cases: Vec<(usize, f64, f64)> = (0..*count as u64)
                .into_par_iter()
                .map(|i| {
                    let mut rng = rng_for(config.seed, i);
                    let dim = rng.random_range(*dim_min..=*dim_max);
                    let rank = if *pure_only { 1 } else { rng.random_range(1..=dim) };
                    let rho = random_density_matrix(dim, rank, &mut rng);
                    let k = Observable::new(random_hermitian(dim, &mut rng))?;
                    let gap = qfi_variance_gap(&rho, &k, hbar)?;
                    Ok((rank, gap.qfi, gap.bound))
                })
                .collect::<qsl_core::Result<_>>()
                .map_err(core)?;
            let mut violations = Vec::new();
            let (mut worst_gap, mut max_pure_deviation, mut pure_cases) = (f64::INFINITY, 0.0_f64, 0usize);
            for (i, &(rank, q, bound)) in cases.iter().enumerate() {
                worst_gap = worst_gap.min(bound - q);
                if q > bound + INEQUALITY_TOL {
                    violations.push(format!("case {i}: qfi {q:e} exceeds 4 Var/hbar^2 = {bound:e}"));
                }
                if rank == 1 {
                    pure_cases += 1;
                    max_pure_deviation = max_pure_deviation.max((q - bound).abs());
                    if (q - bound).abs() > INEQUALITY_TOL {
                        violations.push(format!("case {i}: pure state qfi {q:e} differs from 4 Var/hbar^2 = {bound:e}"));
                    }
                }
            }
            let value = json!({
                "cases": count,
                "pure_cases": pure_cases,
                "violations": violations.len(),
                "worst_gap": num(worst_gap),
                "max_pure_deviation": num(max_pure_deviation),
            });
            Ok(ScenarioOutcome { value, violations, curve: None })
        }
        Scenario::DistanceTable { distributions, states } => {
            let table = |n: usize, f: &dyn Fn(usize, usize) -> qsl_core::Result<f64>| -> qsl_core::Result<Value> {
                let mut rows = Vec::with_capacity(n);
                for a in 0..n {
                    let row = (0..n).map(|b| f(a, b).map(num)).collect::<qsl_core::Result<Vec<_>>>()?;
                    rows.push(Value::Array(row));
                }
                Ok(Value::Array(rows))
            };
            let pure = states.iter().map(|a| PureState::normalized(a.clone())).collect::<qsl_core::Result<Vec<_>>>().map_err(core)?;
            let rhos: Vec<_> = pure.iter().map(PureState::to_density).collect();
            let conv: DistanceConvention = config.convention;
            let value = json!({
                "classical_geodesic": table(distributions.len(), &|a, b| classical_geodesic_distance(&distributions[a], &distributions[b])).map_err(core)?,
                "wootters_distance": table(pure.len(), &|a, b| wootters_distance(&pure[a], &pure[b])).map_err(core)?,
                "bures_angle": table(rhos.len(), &|a, b| bures_angle(&rhos[a], &rhos[b], conv)).map_err(core)?,
                "fidelity": table(rhos.len(), &|a, b| fidelity(&rhos[a], &rhos[b])).map_err(core)?,
            });
            Ok(ScenarioOutcome { value, violations: Vec::new(), curve: None })
        }
        Scenario::Counterexample(params) => {
            let report = end_to_end_counterexample(params, hbar).map_err(core)?;
            Ok(ScenarioOutcome { value: counterexample_value(&report), violations: Vec::new(), curve: None })
        }
    }
}

fn orbit_outcome(
    orbit: &OrbitSpec,
    psi: PureState,
    config: &ScenarioConfig,
    core: &dyn Fn(qsl_core::Error) -> CliError,
) -> CliResult<(ScenarioOutcome, BoundReport)> {
    let hbar = config.hbar;
    let k = Observable::diagonal(&orbit.levels).map_err(core)?;
    let state: QuantumState = psi.into();
    let scenario = match orbit.theta_max {
        Some(t) => EvolutionScenario::new(state, k, t, orbit.samples),
        None => EvolutionScenario::with_defaults(state, k, hbar)
            .and_then(|s| EvolutionScenario::new(s.initial, s.generator, s.theta_max, orbit.samples)),
    }
    .map_err(core)?;
    let bounds = bound_report(&scenario, orbit.eps, config.convention, hbar).map_err(core)?;
    let rates = rate_bound_check(&scenario, hbar).map_err(core)?;
    let mut violations = Vec::new();
    if !bounds.respects_bounds(INEQUALITY_TOL) {
        violations.push(format!("orthogonality time {:?} undercuts a bound", bounds.orthogonality_theta));
    }
    let curve = match config.curve_path {
        Some(_) => Some(orbit_curve(&scenario, hbar).map_err(core)?),
        None => None,
    };
    let value = json!({
        "theta_max": num(scenario.theta_max),
        "samples": scenario.samples,
        "bounds": bound_value(&bounds),
        "respects_bounds": bounds.respects_bounds(INEQUALITY_TOL),
        "margin": opt(bounds.margin()),
        "rates": rate_value(&rates),
    });
    Ok((ScenarioOutcome { value, violations, curve }, bounds))
}

fn bound_value(b: &BoundReport) -> Value {
    json!({
        "orthogonality_theta": opt(b.orthogonality_theta),
        "mt_bound": num(b.mt_bound),
        "ml_bound_ground_referenced": num(b.ml_bound_ground_referenced),
        "ml_bound_raw": num(b.ml_bound_raw),
        "attained_distance": num(b.attained_distance),
        "convention": b.convention,
    })
}

fn rate_value(r: &RateReport) -> Value {
    json!({
        "mt_rate_bound": num(r.mt_rate_bound),
        "ml_rate_bound": num(r.ml_rate_bound),
        "max_rate": num(r.max_rate),
        "samples_checked": r.samples_checked,
        "ml_rate_exceedances": r.ml_rate_exceedances,
        "first_ml_exceedance_theta": opt(r.first_ml_exceedance_theta),
    })
}

fn verdict_value(v: &Verdict) -> Value {
    json!({
        "t_cz": num(v.timing.t_cz),
        "t_h": num(v.timing.t_h),
        "t_phi": num(v.timing.t_phi),
        "tau": num(v.timing.tau),
        "unitary_limit": num(v.unitary_limit),
        "violated": v.violated,
        "g_threshold": opt(v.g_threshold),
        "regime_ok": v.regime_ok,
    })
}

fn complex(z: C64) -> Value {
    json!([num(z.re), num(z.im)])
}

fn counterexample_value(r: &CounterexampleReport) -> Value {
    let p = &r.params;
    json!({
        "params": { "e0": num(p.e0), "eq": num(p.eq), "g": num(p.g), "n": p.n, "phi": num(p.phi), "t_phi": num(p.t_phi) },
        "overlap_with_initial": num(r.outcome.overlap_with_initial),
        "satellite_overlap": num(r.outcome.satellite_overlap),
        "final_central_amplitudes": r.outcome.final_amplitudes.iter().copied().map(complex).collect::<Vec<_>>(),
        "stage_residuals": r.stage_residuals.as_ref().map(|rs| {
            rs.iter().map(|s| json!({ "stage": s.stage, "residual": num(s.residual) })).collect::<Vec<_>>()
        }),
        "orthogonal": r.orthogonal,
        "satellites_restored": r.satellites_restored,
        "nominal": verdict_value(&r.verdict.nominal),
        "measured": verdict_value(&r.verdict.measured),
        "measured_t_cz": num(r.verdict.measured_t_cz),
        "tau_with_small_phase": num(r.verdict.tau_with_small_phase),
        "bounds_violated": r.bounds_violated,
        "bounds_violated_measured": r.bounds_violated_measured,
    })
}
