use std::f64::consts::PI;

use proptest::prelude::*;
use qsl_core::counterexample::heisenberg::{measured_cz_time, measured_period};
use qsl_core::counterexample::{
    cross_check, end_to_end_counterexample, heisenberg_stabilizer_evolution, stabilizer_stage_sequence,
    statevector_run, violation_verdict, CounterexampleParams, Pauli, PauliSum, PauliWord,
};

#[test]
fn period_is_independent_of_satellite_count() {
    let g = 1.7;
    let periods: Vec<f64> = [1, 2, 4, 8].iter().map(|&n| measured_period(n, g, 1.0).unwrap().unwrap()).collect();
    for p in &periods {
        assert!((p - periods[0]).abs() < 1e-9, "{periods:?}");
    }
    assert!((periods[0] - PI / (2.0 * g)).abs() < 1e-9);
}

#[test]
fn generators_commute_on_a_dense_grid() {
    let g = 1.0;
    let period = PI / (2.0 * g);
    let grid: Vec<f64> = (0..256).map(|i| i as f64 * period / 256.0).collect();
    for n in [1, 2, 4, 8] {
        let traj = heisenberg_stabilizer_evolution(n, g, &grid, 1.0).unwrap();
        assert!(traj.max_commutator() < 1e-10, "n={n}");
        assert!(traj.max_imag() < 1e-12);
    }
}

#[test]
fn measured_gate_time_is_a_quarter_of_nominal() {
    for g in [0.5, 1.0, 6.0] {
        let t = measured_cz_time(3, g, 1.0).unwrap().unwrap();
        assert!((t - PI / (4.0 * g)).abs() < 1e-9);
    }
}

#[test]
fn eight_satellite_run_flips_the_central_qubit() {
    let params = CounterexampleParams::canonical(1.0, 3.0, 6.0, 8);
    assert!((params.phi - PI / 8.0).abs() < 1e-15);
    let report = end_to_end_counterexample(&params, 1.0).unwrap();
    assert!(report.outcome.overlap_with_initial <= 1e-9);
    assert!((report.outcome.satellite_overlap - 1.0).abs() <= 1e-10);
    assert_eq!(report.stage_residuals.as_ref().unwrap().len(), 6);
    assert!((report.verdict.nominal.timing.tau - 2.0 * PI / 3.0).abs() < 1e-12);
    assert!(report.bounds_violated);
}

#[test]
fn regime_flip_at_both_thresholds() {
    let (e0, eq) = (1.0, 3.0);
    let nominal = violation_verdict(&CounterexampleParams::canonical(e0, eq, 1.0, 2), 1.0).unwrap();
    for (threshold, pick) in [
        (nominal.nominal.g_threshold.unwrap(), 0usize),
        (nominal.measured.g_threshold.unwrap(), 1usize),
    ] {
        for (factor, expect) in [(0.9, false), (1.1, true)] {
            let v = violation_verdict(&CounterexampleParams::canonical(e0, eq, threshold * factor, 2), 1.0).unwrap();
            let verdict = if pick == 0 { v.nominal } else { v.measured };
            assert_eq!(verdict.violated, expect, "threshold {threshold} x {factor}");
            assert_eq!(verdict.regime_ok, expect);
        }
    }
}

#[test]
fn final_central_generator_for_eight_satellites() {
    let phi = PI / 8.0;
    let stages = stabilizer_stage_sequence(8, phi).unwrap();
    let expected = PauliSum::from_real(9, &[(PauliWord::single(0, Pauli::X), -1.0)]);
    assert!(stages[5].central.distance(&expected) < 1e-12);
    assert_eq!(stages[2].satellites[0], PauliSum::word(9, PauliWord::from_pairs(&[(0, Pauli::Z), (1, Pauli::Z)])));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn stabilizer_and_statevector_pictures_agree(n in 1usize..=5, phi in -4.0f64..4.0) {
        let residuals = cross_check(n, phi).unwrap();
        prop_assert!(residuals.iter().all(|r| r.residual < 1e-10));
        let out = statevector_run(n, phi).unwrap();
        prop_assert!((out.satellite_overlap - 1.0).abs() < 1e-10);
        prop_assert!((out.overlap_with_initial - (n as f64 * phi / 2.0).cos().abs()).abs() < 1e-10);
    }
}
