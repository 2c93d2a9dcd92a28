//! Built-in acceptance suite behind `qsl check`.
//!
//! Each criterion returns a verdict and a one-line detail string. Details
//! contain no timings, so the rendered report is byte-identical across runs
//! with the same seed.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use qsl_core::counterexample::{
    end_to_end_counterexample, heisenberg_stabilizer_evolution, measured_period, violation_verdict,
    CounterexampleParams, CROSS_CHECK_TOL,
};
use qsl_core::distances::{
    classical_geodesic_distance, classical_geodesic_point, classical_infinitesimal_distance_sq, classical_path_length,
    lowering_superop, quantum_infinitesimal_distance_sq,
};
use qsl_core::information::{orbit_tangent, qfi, qfi_variance_gap};
use qsl_core::sampling::{orthogonalizing_pure_scenario, random_density_matrix, random_hermitian, rng_for};
use qsl_core::speedlimit::{bound_report, ml_bound, mt_bound, orthogonality_time, rate_bound_check};
use qsl_core::{
    ComplexMatrix, DensityMatrix, DistanceConvention, EvolutionScenario, Observable, ProbDist, PureState, QuantumState,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::config::parse_config;
use crate::runner;

pub const CRITERIA: [Criterion; 9] = [
    Criterion { id: 1, name: "saturating qubit", budget: Some(Duration::from_secs(1)) },
    Criterion { id: 2, name: "qfi variance bound", budget: Some(Duration::from_secs(30)) },
    Criterion { id: 3, name: "two-path qfi oracle", budget: Some(Duration::from_secs(10)) },
    Criterion { id: 4, name: "classical and quantum metrics agree", budget: None },
    Criterion { id: 5, name: "unitary speed-limit suite", budget: None },
    Criterion { id: 6, name: "counterexample end to end", budget: Some(Duration::from_secs(10)) },
    Criterion { id: 7, name: "regime boundary", budget: None },
    Criterion { id: 8, name: "periodicity and commutation", budget: None },
    Criterion { id: 9, name: "deterministic reports", budget: None },
];

#[derive(Clone, Copy, Debug)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub budget: Option<Duration>,
}

#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    pub criterion: Criterion,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CriterionOutcome {
    pub fn within_budget(&self) -> bool {
        self.criterion.budget.is_none_or(|b| self.elapsed < b)
    }

    pub fn line(&self, include_timing: bool) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let mut line = format!("[{verdict}] {} {}: {}", self.criterion.id, self.criterion.name, self.detail);
        if include_timing {
            line.push_str(&format!(" ({:.3} s)", self.elapsed.as_secs_f64()));
        }
        line
    }
}

type Check = std::result::Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn core<T>(r: qsl_core::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Independent random stream for one case of one criterion.
fn stream(seed: u64, criterion: u64, case: u64) -> ChaCha8Rng {
    rng_for(seed, (criterion << 32) | case)
}

pub fn run_criterion(id: u8, seed: u64) -> CriterionOutcome {
    let criterion = CRITERIA[usize::from(id) - 1];
    let start = Instant::now();
    let result = match id {
        1 => saturating_qubit(),
        2 => qfi_bound(seed),
        3 => qfi_two_paths(seed),
        4 => metric_consistency(seed),
        5 => unitary_suite(seed),
        6 => counterexample_end_to_end(),
        7 => regime_boundary(),
        8 => periodicity(),
        9 => determinism(seed),
        _ => Err(format!("no criterion {id}")),
    };
    let elapsed = start.elapsed();
    let (passed, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionOutcome { criterion, passed, detail, elapsed }
}

pub fn run_all(seed: u64) -> Vec<CriterionOutcome> {
    CRITERIA.iter().map(|c| run_criterion(c.id, seed)).collect()
}

pub fn render(outcomes: &[CriterionOutcome], seed: u64, include_timing: bool) -> String {
    let mut text = format!("qsl {} check, seed {seed}\n", env!("CARGO_PKG_VERSION"));
    for o in outcomes {
        text.push_str(&o.line(include_timing));
        text.push('\n');
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    text.push_str(&format!("{passed}/{} criteria passed\n", outcomes.len()));
    text
}

fn saturating_qubit() -> Check {
    let k = core(Observable::diagonal(&[0.0, 1.0]))?;
    let state: QuantumState = PureState::plus().into();
    let s = core(EvolutionScenario::with_defaults(state.clone(), k.clone(), 1.0))?;
    let theta = core(orthogonality_time(&s, qsl_core::speedlimit::DEFAULT_ORTHOGONALITY_EPS, 1.0))?
        .ok_or("no orthogonality time found")?;
    let mt = core(mt_bound(&state, &k, 1.0))?;
    let ml = core(ml_bound(&state, &k, true, 1.0))?;
    let err = [theta, mt, ml].iter().map(|x| (x - PI).abs()).fold(0.0, f64::max);
    ensure(err <= 1e-9, format!("orthogonality {theta:.15}, mt {mt:.15}, ml {ml:.15}, max |x - pi| {err:.2e}"))
}

fn qfi_bound(seed: u64) -> Check {
    const CASES: u64 = 1200;
    let (mut worst, mut pure_dev, mut pure_cases, mut failures) = (f64::INFINITY, 0.0_f64, 0, 0);
    for i in 0..CASES {
        let mut rng = stream(seed, 2, i);
        let dim = rng.random_range(2..=8);
        let rank = if i % 4 == 0 { 1 } else { rng.random_range(1..=dim) };
        let hbar = [1.0, 0.5, 2.0][(i % 3) as usize];
        let rho = random_density_matrix(dim, rank, &mut rng);
        let k = core(Observable::new(random_hermitian(dim, &mut rng)))?;
        let gap = core(qfi_variance_gap(&rho, &k, hbar))?;
        worst = worst.min(gap.gap());
        if gap.qfi > gap.bound + 1e-9 {
            failures += 1;
        }
        if rank == 1 {
            pure_cases += 1;
            pure_dev = pure_dev.max((gap.qfi - gap.bound).abs());
            if (gap.qfi - gap.bound).abs() > 1e-9 {
                failures += 1;
            }
        }
    }
    ensure(
        failures == 0,
        format!(
            "{CASES} pairs, {failures} failures, smallest gap {worst:.3e}, {pure_cases} pure cases with max deviation {pure_dev:.3e}"
        ),
    )
}

fn qfi_two_paths(seed: u64) -> Check {
    const CASES: u64 = 300;
    let mut worst = 0.0_f64;
    for i in 0..CASES {
        let mut rng = stream(seed, 3, i);
        let dim = rng.random_range(2..=8);
        let rho = random_density_matrix(dim, dim, &mut rng);
        let k = core(Observable::new(random_hermitian(dim, &mut rng)))?;
        let hbar = 0.7;
        let tangent = orbit_tangent(&rho, &k, hbar);
        let lowered = core(lowering_superop(&rho, &tangent))?;
        let trace_route = (&tangent * &lowered).trace().re;
        let direct = core(qfi(&rho, &k, hbar))?;
        worst = worst.max((direct - trace_route).abs());
    }
    ensure(worst <= 1e-9, format!("{CASES} full-rank cases, max disagreement {worst:.3e}"))
}

fn random_simplex_point(rng: &mut ChaCha8Rng, dim: usize, floor: f64) -> std::result::Result<ProbDist, String> {
    let w: Vec<f64> = (0..dim).map(|_| rng.random_range(floor..1.0)).collect();
    let total: f64 = w.iter().sum();
    core(ProbDist::new(w.iter().map(|x| x / total).collect()))
}

fn metric_consistency(seed: u64) -> Check {
    let mut worst_reduction = 0.0_f64;
    for i in 0..500 {
        let mut rng = stream(seed, 4, i);
        let dim = rng.random_range(2..=8);
        let p = random_simplex_point(&mut rng, dim, 0.01)?;
        let mut dp: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mean = dp.iter().sum::<f64>() / dim as f64;
        dp.iter_mut().for_each(|x| *x -= mean);
        let classical = core(classical_infinitesimal_distance_sq(&p, &dp))?;
        let quantum = core(quantum_infinitesimal_distance_sq(
            &DensityMatrix::diagonal(&p),
            &ComplexMatrix::from_real_diagonal(&dp),
        ))?;
        worst_reduction = worst_reduction.max((classical - quantum).abs() / classical.max(1.0));
    }
    let mut worst_path = 0.0_f64;
    for i in 0..50 {
        let mut rng = stream(seed, 4, 1000 + i);
        let dim = rng.random_range(2..=6);
        let p = random_simplex_point(&mut rng, dim, 0.05)?;
        let q = random_simplex_point(&mut rng, dim, 0.05)?;
        let d = core(classical_geodesic_distance(&p, &q))?;
        let along = classical_path_length(|t| classical_geodesic_point(&p, &q, t).expect("same dimension"), 2000);
        worst_path = worst_path.max((along - d).abs());
    }
    ensure(
        worst_reduction <= 1e-12 && worst_path <= 1e-6,
        format!("diagonal reduction discrepancy {worst_reduction:.3e}, geodesic vs path integral {worst_path:.3e}"),
    )
}

fn unitary_suite(seed: u64) -> Check {
    const CASES: u64 = 500;
    let (mut detected, mut min_margin, mut max_excess) = (0, f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..CASES {
        let mut rng = stream(seed, 5, i);
        let dim = rng.random_range(2..=8);
        let hbar = if i % 4 == 0 { 0.5 } else { 1.0 };
        let sc = orthogonalizing_pure_scenario(dim, hbar, &mut rng);
        let k = core(Observable::new(sc.generator.clone()))?;
        let s = core(EvolutionScenario::new(sc.state.clone().into(), k, sc.designed_theta * 1.01, 256))?;
        let r = core(bound_report(&s, qsl_core::speedlimit::DEFAULT_ORTHOGONALITY_EPS, DistanceConvention::WoottersAngle, hbar))?;
        if r.orthogonality_theta.is_some() {
            detected += 1;
        }
        if !r.respects_bounds(1e-9) {
            return Err(format!("case {i}: orthogonality {:?} undercuts a bound", r.orthogonality_theta));
        }
        if let Some(m) = r.margin() {
            min_margin = min_margin.min(m);
        }
        let rates = rate_bound_check(&s, hbar).map_err(|e| format!("case {i}: {e}"))?;
        max_excess = max_excess.max(rates.max_rate - rates.mt_rate_bound);
    }
    ensure(
        detected > 0,
        format!(
            "{CASES} scenarios, {detected} orthogonal, 0 rate violations, smallest bound margin {min_margin:.3e}, largest rate excess {max_excess:.3e}"
        ),
    )
}

fn counterexample_end_to_end() -> Check {
    let params = CounterexampleParams::canonical(1.0, 3.0, 6.0, 8);
    let r = core(end_to_end_counterexample(&params, 1.0))?;
    let tau = r.verdict.nominal.timing.tau;
    let stages = r.stage_residuals.as_ref().ok_or("stage cross-check skipped")?;
    let worst_stage = stages.iter().map(|s| s.residual).fold(0.0, f64::max);
    let ok = r.outcome.overlap_with_initial <= 1e-9
        && (r.outcome.satellite_overlap - 1.0).abs() <= 1e-10
        && (tau - 2.0 * PI / 3.0).abs() <= 1e-12
        && tau < PI
        && r.bounds_violated
        && stages.len() == 6
        && worst_stage <= CROSS_CHECK_TOL;
    ensure(
        ok,
        format!(
            "overlap {:.3e}, satellites {:.3e} from 1, tau {tau:.15} < pi, {} stages with max residual {worst_stage:.3e}",
            r.outcome.overlap_with_initial,
            (r.outcome.satellite_overlap - 1.0).abs(),
            stages.len()
        ),
    )
}

fn regime_boundary() -> Check {
    let (e0, eq) = (1.0, 3.0);
    let probe = core(violation_verdict(&CounterexampleParams::canonical(e0, eq, 1.0, 2), 1.0))?;
    let nominal = probe.nominal.g_threshold.ok_or("no nominal threshold")?;
    let measured = probe.measured.g_threshold.ok_or("no measured threshold")?;
    let mut flips = Vec::new();
    for (label, threshold, pick_measured) in [("nominal", nominal, false), ("measured", measured, true)] {
        for (factor, expect) in [(0.9, false), (1.1, true)] {
            let v = core(violation_verdict(&CounterexampleParams::canonical(e0, eq, threshold * factor, 2), 1.0))?;
            let verdict = if pick_measured { v.measured } else { v.nominal };
            if verdict.violated != expect || verdict.regime_ok != expect {
                return Err(format!("{label} threshold {threshold}: wrong verdict at factor {factor}"));
            }
            flips.push(format!("{label} {factor}x -> {}", if expect { "violated" } else { "respected" }));
        }
    }
    Ok(format!("nominal threshold {nominal:.12}, measured threshold {measured:.12}; {}", flips.join(", ")))
}

fn periodicity() -> Check {
    let g = 1.0;
    let mut periods = Vec::new();
    for n in [1, 2, 4, 8] {
        periods.push(core(measured_period(n, g, 1.0))?.ok_or_else(|| format!("no period found for n = {n}"))?);
    }
    let spread = periods.iter().map(|p| (p - periods[0]).abs()).fold(0.0, f64::max);
    let grid: Vec<f64> = (0..256).map(|i| i as f64 * periods[0] / 256.0).collect();
    let mut worst_commutator = 0.0_f64;
    for n in [1, 2, 4, 8] {
        let traj = core(heisenberg_stabilizer_evolution(n, g, &grid, 1.0))?;
        worst_commutator = worst_commutator.max(traj.max_commutator());
    }
    ensure(
        spread <= 1e-9 && worst_commutator <= 1e-10,
        format!(
            "period {:.15} for n in 1,2,4,8 (spread {spread:.3e}), max commutator on 256 points {worst_commutator:.3e}",
            periods[0]
        ),
    )
}

/// Configs run twice by the determinism criterion; sweeps exercise the parallel path.
pub const DETERMINISM_CONFIGS: [&str; 3] = [
    r#"
kind = "qfi_sweep"
output_path = "qfi.json"
[parameters]
count = 200
[sweep]
parameter = "dim_max"
values = [3, 5, 8]
"#,
    r#"
kind = "counterexample"
output_path = "counterexample.json"
[parameters]
e0 = 1.0
eq = 3.0
g = 6.0
n = 4
[sweep]
parameter = "g"
values = [3.5, 6.0, 12.0]
"#,
    r#"
kind = "bound_check"
output_path = "bound.json"
[parameters]
levels = [0.0, 0.4, 1.3]
amplitudes = [0.6, [0.0, 0.6], 0.52915026221291811]
"#,
];

fn determinism(seed: u64) -> Check {
    let mut bytes = 0;
    for text in DETERMINISM_CONFIGS {
        let text = format!("seed = {seed}\n{text}");
        let config = parse_config(&text).map_err(|e| e.to_string())?;
        let first = runner::run(&config).map_err(|e| e.to_string())?.to_json(false);
        let second = runner::run(&config).map_err(|e| e.to_string())?.to_json(false);
        if first != second {
            return Err(format!("{} reports differ between runs", config.kind.name()));
        }
        bytes += first.len();
    }
    Ok(format!("{} configs run twice, {bytes} report bytes identical", DETERMINISM_CONFIGS.len()))
}
