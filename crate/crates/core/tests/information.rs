use qsl_core::distances::lowering_superop;
use qsl_core::information::{classical_fisher, default_fd_step, orbit_tangent, qfi, qfi_variance_gap, variance};
use qsl_core::linalg::expm_unitary;
use qsl_core::sampling::{random_density_matrix, random_hermitian, random_povm, random_pure_state, rng_for};
use qsl_core::{DensityMatrix, Observable};
use rand::Rng;

#[test]
fn qfi_never_exceeds_four_variance() {
    let mut worst_gap = f64::INFINITY;
    for i in 0..1200 {
        let mut rng = rng_for(21, i);
        let dim = rng.random_range(2..=8);
        let rank = rng.random_range(1..=dim);
        let hbar = [1.0, 0.5, 2.0][i as usize % 3];
        let rho = random_density_matrix(dim, rank, &mut rng);
        let k = Observable::new(random_hermitian(dim, &mut rng)).unwrap();
        let gap = qfi_variance_gap(&rho, &k, hbar).unwrap();
        assert!(gap.qfi <= gap.bound + 1e-9, "case {i}: {} > {}", gap.qfi, gap.bound);
        worst_gap = worst_gap.min(gap.gap());
    }
    assert!(worst_gap > -1e-9);
}

#[test]
fn pure_states_saturate_the_variance_bound() {
    for i in 0..300 {
        let mut rng = rng_for(22, i);
        let dim = rng.random_range(2..=8);
        let psi = random_pure_state(dim, &mut rng);
        let k = Observable::new(random_hermitian(dim, &mut rng)).unwrap();
        let gap = qfi_variance_gap(&psi.to_density(), &k, 1.0).unwrap();
        assert!((gap.qfi - gap.bound).abs() < 1e-9, "case {i}: {} vs {}", gap.qfi, gap.bound);
    }
}

#[test]
fn eigenbasis_sum_matches_lowering_route() {
    for i in 0..300 {
        let mut rng = rng_for(23, i);
        let dim = rng.random_range(2..=8);
        let rho = random_density_matrix(dim, dim, &mut rng);
        let k = Observable::new(random_hermitian(dim, &mut rng)).unwrap();
        let hbar = 0.7;
        let tangent = orbit_tangent(&rho, &k, hbar);
        let lowered = lowering_superop(&rho, &tangent).unwrap();
        let trace_route = (&tangent * &lowered).trace().re;
        let direct = qfi(&rho, &k, hbar).unwrap();
        assert!((direct - trace_route).abs() < 1e-9, "case {i}: {direct} vs {trace_route}");
    }
}

#[test]
fn qfi_scales_with_inverse_hbar_squared() {
    let mut rng = rng_for(24, 0);
    let rho = random_density_matrix(4, 3, &mut rng);
    let k = Observable::new(random_hermitian(4, &mut rng)).unwrap();
    let base = qfi(&rho, &k, 1.0).unwrap();
    assert!((qfi(&rho, &k, 2.0).unwrap() - base / 4.0).abs() < 1e-12 * base.max(1.0));
    assert!((variance(&rho, &k).unwrap() - variance(&rho, &k.shifted(3.0).unwrap()).unwrap()).abs() < 1e-12);
}

#[test]
fn measured_fisher_information_is_bounded_by_qfi() {
    for i in 0..100 {
        let mut rng = rng_for(25, i);
        let dim = rng.random_range(2..=5);
        let rho = random_density_matrix(dim, dim, &mut rng);
        let k = Observable::new(random_hermitian(dim, &mut rng)).unwrap();
        let outcomes = rng.random_range(2..=6);
        let povm = random_povm(dim, outcomes, &mut rng);
        let theta = rng.random_range(0.0..2.0);
        let orbit = |t: f64| {
            let u = expm_unitary(k.matrix(), t, 1.0)?;
            DensityMatrix::new(rho.matrix().conjugate_by(&u.adjoint()))
        };
        let fisher = classical_fisher(orbit, &povm, theta, default_fd_step(theta)).unwrap();
        let quantum = qfi(&rho, &k, 1.0).unwrap();
        assert!(fisher <= quantum * (1.0 + 1e-6) + 1e-8, "case {i}: {fisher} > {quantum}");
    }
}
