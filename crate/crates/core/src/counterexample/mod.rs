//! Star-graph protocol that flips a qubit faster than its own energy allows.
//!
//! A central qubit with energy scale `e0` couples to `n` satellites through a
//! controlled-Z interaction of strength `g`. After the gate sequence the
//! central qubit ends in the state orthogonal to its start, while the
//! satellites return to `|+⟩`. When the coupling is strong enough the total
//! schedule is shorter than `πħ/e0`, the unitary limit for the central qubit
//! alone.
//!
//! The controlled-Z duration can be taken from the nominal value `πħ/g` or
//! measured from the Heisenberg trajectories; both verdicts are reported.

pub mod heisenberg;
pub mod pauli;
pub mod stabilizer;
pub mod statevector;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use heisenberg::{heisenberg_stabilizer_evolution, measured_cz_time, measured_period, StabilizerTrajectory};
pub use pauli::{DiagonalHamiltonian, Gate, Pauli, PauliString, PauliSum, PauliWord};
pub use stabilizer::{stabilizer_stage_sequence, Stage, StageGenerators};
pub use statevector::{stage_states, statevector_run, StateVector, StatevectorOutcome};

/// Agreement required between statevector and stabilizer descriptions.
pub const CROSS_CHECK_TOL: f64 = 1e-10;
/// Central fidelity with its initial state below which it counts as flipped.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;
/// Phase-gate duration used for the robustness figure, as a fraction of `πħ/e0`.
pub const SMALL_PHASE_FRACTION: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleParams {
    /// Energy scale of the central qubit.
    pub e0: f64,
    /// Energy scale of each satellite.
    pub eq: f64,
    /// Interaction strength.
    pub g: f64,
    /// Number of satellites.
    pub n: usize,
    /// Phase applied on each satellite.
    pub phi: f64,
    /// Duration of the phase layer.
    #[serde(default)]
    pub t_phi: f64,
}

impl CounterexampleParams {
    /// Parameters with the flipping phase `π/n` and an instantaneous phase layer.
    pub fn canonical(e0: f64, eq: f64, g: f64, n: usize) -> Self {
        Self { e0, eq, g, n, phi: PI / n.max(1) as f64, t_phi: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("e0", self.e0), ("eq", self.eq), ("g", self.g)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.t_phi.is_finite() && self.t_phi >= 0.0) {
            return Err(Error::InvalidParameter(format!("t_phi must be nonnegative, got {}", self.t_phi)));
        }
        if !self.phi.is_finite() {
            return Err(Error::InvalidParameter(format!("phi must be finite, got {}", self.phi)));
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter("at least one satellite is required".into()));
        }
        if self.n > statevector::MAX_SATELLITES {
            return Err(Error::TooManyQubits { requested: self.n, max: statevector::MAX_SATELLITES });
        }
        Ok(())
    }
}

/// Durations of the gate layers; `tau` covers two CZ layers, two Hadamard layers and the phase layer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleTiming {
    pub t_cz: f64,
    pub t_h: f64,
    pub t_phi: f64,
    pub tau: f64,
}

/// Nominal controlled-Z duration `πħ/g`.
pub fn nominal_cz_time(g: f64, hbar: f64) -> f64 {
    PI * hbar / g
}

/// Schedule with a given controlled-Z duration and fastest single-qubit gates.
pub fn schedule_with_cz(params: &CounterexampleParams, t_cz: f64, hbar: f64) -> ScheduleTiming {
    // a Hadamard on a satellite of energy eq needs at least πħ/(2 eq)
    let t_h = PI * hbar / (2.0 * params.eq);
    ScheduleTiming { t_cz, t_h, t_phi: params.t_phi, tau: 2.0 * t_cz + 2.0 * t_h + params.t_phi }
}

/// Schedule under the nominal controlled-Z duration.
pub fn gate_time_budget(params: &CounterexampleParams, hbar: f64) -> Result<ScheduleTiming> {
    params.validate()?;
    Ok(schedule_with_cz(params, nominal_cz_time(params.g, hbar), hbar))
}

/// Coupling above which `tau < πħ/e0` at `t_phi = 0`, for `t_cz = cz_factor·ħ/g`.
pub fn regime_threshold(e0: f64, eq: f64, cz_factor: f64) -> Result<f64> {
    if !(eq > e0) {
        return Err(Error::DegenerateRegime { e0, eq });
    }
    Ok(2.0 * cz_factor / PI * e0 * eq / (eq - e0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub timing: ScheduleTiming,
    /// `πħ/e0`
    pub unitary_limit: f64,
    pub violated: bool,
    /// Coupling threshold; `None` when `eq <= e0`.
    pub g_threshold: Option<f64>,
    /// `eq > e0` and `g` above the threshold.
    pub regime_ok: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationVerdict {
    pub nominal: Verdict,
    pub measured: Verdict,
    pub measured_t_cz: f64,
    /// `tau` under the nominal CZ time with a phase layer of `SMALL_PHASE_FRACTION·πħ/e0`.
    pub tau_with_small_phase: f64,
}

fn verdict(params: &CounterexampleParams, t_cz: f64, hbar: f64) -> Verdict {
    let timing = schedule_with_cz(params, t_cz, hbar);
    let unitary_limit = PI * hbar / params.e0;
    let g_threshold = regime_threshold(params.e0, params.eq, t_cz * params.g / hbar).ok();
    Verdict {
        timing,
        unitary_limit,
        violated: timing.tau < unitary_limit,
        g_threshold,
        regime_ok: g_threshold.is_some_and(|th| params.g > th),
    }
}

pub fn violation_verdict(params: &CounterexampleParams, hbar: f64) -> Result<ViolationVerdict> {
    params.validate()?;
    let probe = params.n.min(stabilizer::MAX_EXPANDED_SATELLITES);
    let measured_t_cz = heisenberg::measured_cz_time(probe, params.g, hbar)?
        .ok_or_else(|| Error::CrossCheckMismatch("controlled-Z target never reached".into()))?;
    let nominal_t_cz = nominal_cz_time(params.g, hbar);
    let small = CounterexampleParams { t_phi: SMALL_PHASE_FRACTION * PI * hbar / params.e0, ..params.clone() };
    Ok(ViolationVerdict {
        nominal: verdict(params, nominal_t_cz, hbar),
        measured: verdict(params, measured_t_cz, hbar),
        measured_t_cz,
        tau_with_small_phase: schedule_with_cz(&small, nominal_t_cz, hbar).tau,
    })
}

/// Largest stabilizer residual `‖Sψ − ψ‖` at one stage.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageResidual {
    pub stage: Stage,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct CounterexampleReport {
    pub params: CounterexampleParams,
    pub outcome: StatevectorOutcome,
    /// Per-stage agreement between the stabilizer and statevector pictures;
    /// `None` when the register is too large to expand the generators.
    pub stage_residuals: Option<Vec<StageResidual>>,
    pub orthogonal: bool,
    pub satellites_restored: bool,
    pub verdict: ViolationVerdict,
    /// Orthogonality reached and the nominal schedule beats the unitary limit.
    pub bounds_violated: bool,
    /// Same, under the measured controlled-Z duration.
    pub bounds_violated_measured: bool,
}

/// Simulates the protocol, cross-checks both pictures and reports the timing verdict.
pub fn end_to_end_counterexample(params: &CounterexampleParams, hbar: f64) -> Result<CounterexampleReport> {
    params.validate()?;
    let stage_residuals = if params.n <= stabilizer::MAX_EXPANDED_SATELLITES {
        Some(cross_check(params.n, params.phi)?)
    } else {
        None
    };
    let outcome = statevector_run(params.n, params.phi)?;
    let orthogonal = outcome.overlap_with_initial <= ORTHOGONALITY_TOL;
    let satellites_restored = (outcome.satellite_overlap - 1.0).abs() <= CROSS_CHECK_TOL;
    let verdict = violation_verdict(params, hbar)?;
    Ok(CounterexampleReport {
        params: params.clone(),
        stage_residuals,
        orthogonal,
        satellites_restored,
        bounds_violated: orthogonal && verdict.nominal.violated,
        bounds_violated_measured: orthogonal && verdict.measured.violated,
        verdict,
        outcome,
    })
}

/// Checks that each stage state is a +1 eigenvector of every generator of that stage.
pub fn cross_check(n: usize, phi: f64) -> Result<Vec<StageResidual>> {
    let gens = stabilizer_stage_sequence(n, phi)?;
    let states = stage_states(n, phi)?;
    let mut out = Vec::with_capacity(gens.len());
    for (g, (stage, psi)) in gens.iter().zip(&states) {
        let residual = g
            .all()
            .chain(std::iter::once(&g.central_unreduced))
            .map(|s| psi.stabilizer_residual(s))
            .fold(0.0, f64::max);
        if residual > CROSS_CHECK_TOL {
            return Err(Error::CrossCheckMismatch(format!(
                "stage ({}) generator residual {residual:e} exceeds {CROSS_CHECK_TOL:e}",
                stage.label()
            )));
        }
        out.push(StageResidual { stage: *stage, residual });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strong_coupling_beats_unitary_limit() {
        let params = CounterexampleParams::canonical(1.0, 3.0, 6.0, 1);
        let report = end_to_end_counterexample(&params, 1.0).unwrap();
        assert!(report.orthogonal);
        assert!(report.satellites_restored);
        let nominal = report.verdict.nominal;
        assert!((nominal.timing.tau - 2.0 * PI / 3.0).abs() < 1e-12);
        assert!((nominal.unitary_limit - PI).abs() < 1e-15);
        assert!(nominal.violated && nominal.regime_ok);
        assert!((nominal.g_threshold.unwrap() - 3.0).abs() < 1e-12);
        assert!(report.bounds_violated && report.bounds_violated_measured);
    }

    #[test]
    fn weak_coupling_does_not_violate() {
        let params = CounterexampleParams::canonical(1.0, 3.0, 2.0, 2);
        let v = violation_verdict(&params, 1.0).unwrap();
        assert!(!v.nominal.violated);
        assert!(!v.nominal.regime_ok);
    }

    #[test]
    fn regime_implies_violation_at_zero_phase_time() {
        for &(e0, eq) in &[(1.0, 1.5), (0.5, 4.0), (2.0, 2.1)] {
            let th = regime_threshold(e0, eq, PI).unwrap();
            for g in [th * 1.001, th * 2.0, th * 10.0] {
                let params = CounterexampleParams::canonical(e0, eq, g, 2);
                let v = violation_verdict(&params, 1.0).unwrap();
                assert!(v.nominal.regime_ok && v.nominal.violated, "e0={e0} eq={eq} g={g}");
            }
        }
    }

    #[test]
    fn measured_threshold_is_a_quarter_of_nominal() {
        let params = CounterexampleParams::canonical(1.0, 3.0, 1.0, 1);
        let v = violation_verdict(&params, 1.0).unwrap();
        assert!((v.measured_t_cz - PI / 4.0).abs() < 1e-9);
        let ratio = v.measured.g_threshold.unwrap() / v.nominal.g_threshold.unwrap();
        assert!((ratio - 0.25).abs() < 1e-9);
    }

    #[test]
    fn degenerate_regime_is_reported() {
        assert!(matches!(regime_threshold(2.0, 2.0, PI), Err(Error::DegenerateRegime { .. })));
        let params = CounterexampleParams::canonical(3.0, 1.0, 100.0, 1);
        let v = violation_verdict(&params, 1.0).unwrap();
        assert!(v.nominal.g_threshold.is_none());
        assert!(!v.nominal.regime_ok);
    }

    #[test]
    fn cross_check_passes_for_generic_phase() {
        for n in 1..=4 {
            let res = cross_check(n, 0.731).unwrap();
            assert_eq!(res.len(), 6);
            assert!(res.iter().all(|r| r.residual < 1e-12));
        }
    }

    #[test]
    fn large_register_skips_expansion() {
        let params = CounterexampleParams::canonical(1.0, 3.0, 6.0, 14);
        let report = end_to_end_counterexample(&params, 1.0).unwrap();
        assert!(report.stage_residuals.is_none());
        assert!(report.orthogonal);
    }

    #[test]
    fn small_phase_layer_is_added_to_tau() {
        let params = CounterexampleParams::canonical(1.0, 3.0, 6.0, 1);
        let v = violation_verdict(&params, 1.0).unwrap();
        assert!((v.tau_with_small_phase - v.nominal.timing.tau - 0.01 * PI).abs() < 1e-12);
    }

    #[test]
    fn tau_decreases_with_coupling_and_satellite_gap() {
        let base = CounterexampleParams::canonical(1.0, 3.0, 6.0, 2);
        let tau = |p: &CounterexampleParams| gate_time_budget(p, 1.0).unwrap().tau;
        let mut prev = tau(&base);
        for g in [7.0, 10.0, 50.0] {
            let t = tau(&CounterexampleParams { g, ..base.clone() });
            assert!(t < prev);
            prev = t;
        }
        let mut prev = tau(&base);
        for eq in [4.0, 8.0, 100.0] {
            let t = tau(&CounterexampleParams { eq, ..base.clone() });
            assert!(t < prev);
            prev = t;
        }
        // g → ∞ leaves the two Hadamard layers
        let t = tau(&CounterexampleParams { g: 1e12, ..base.clone() });
        assert!((t - PI / 3.0).abs() < 1e-9);
        let t1 = gate_time_budget(&base, 1.0).unwrap().t_cz;
        let t2 = gate_time_budget(&CounterexampleParams { g: 12.0, ..base.clone() }, 1.0).unwrap().t_cz;
        assert!((t1 - 2.0 * t2).abs() < 1e-15);
    }

    #[test]
    fn zero_phase_is_not_orthogonal() {
        let params = CounterexampleParams { phi: 0.0, ..CounterexampleParams::canonical(1.0, 3.0, 6.0, 2) };
        let report = end_to_end_counterexample(&params, 1.0).unwrap();
        assert!(!report.orthogonal);
        assert!(!report.bounds_violated);
    }

    #[test]
    fn validation() {
        assert!(CounterexampleParams::canonical(0.0, 1.0, 1.0, 1).validate().is_err());
        assert!(matches!(
            CounterexampleParams::canonical(1.0, 2.0, 1.0, 21).validate(),
            Err(Error::TooManyQubits { .. })
        ));
    }
}
