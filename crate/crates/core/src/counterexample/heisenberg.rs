//! Continuous-time generation of the controlled-Z layer.
//!
//! The interaction `H = Σ_j g(𝕀₀ − Z₀)(𝕀_j − Z_j)` is diagonal, so every
//! Heisenberg-picture generator has a closed form (see
//! [`PauliSum::heisenberg`]). The gate time and the return period are measured
//! here from the trajectories rather than assumed.

use super::pauli::{DiagonalHamiltonian, Pauli, PauliSum, PauliWord};
use crate::error::{Error, Result};
use crate::search::first_touchdown;

/// Coefficient distance below which two generators count as equal.
pub const MATCH_TOL: f64 = 1e-10;
/// Scan density of the event searches, per window.
const SEARCH_SAMPLES: usize = 4096;

/// Generators along a time grid; `satellites[j][i]` is satellite `j+1` at `times[i]`.
#[derive(Clone, Debug)]
pub struct StabilizerTrajectory {
    pub times: Vec<f64>,
    pub central: Vec<PauliSum>,
    pub satellites: Vec<Vec<PauliSum>>,
}

impl StabilizerTrajectory {
    /// Largest commutator coefficient between any two generators at any grid time.
    pub fn max_commutator(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.times.len() {
            let gens: Vec<&PauliSum> =
                std::iter::once(&self.central[i]).chain(self.satellites.iter().map(|s| &s[i])).collect();
            for (a_idx, a) in gens.iter().enumerate() {
                for b in &gens[a_idx + 1..] {
                    worst = worst.max(a.commutator(b).max_abs_coeff());
                }
            }
        }
        worst
    }

    /// Largest imaginary coefficient, zero for Hermitian generators.
    pub fn max_imag(&self) -> f64 {
        self.central.iter().chain(self.satellites.iter().flatten()).map(PauliSum::max_imag).fold(0.0, f64::max)
    }
}

fn validate(n: usize, g: f64, hbar: f64) -> Result<()> {
    if n == 0 || n > super::stabilizer::MAX_EXPANDED_SATELLITES {
        return Err(Error::InvalidParameter(format!(
            "satellite count must be in 1..={}, got {n}",
            super::stabilizer::MAX_EXPANDED_SATELLITES
        )));
    }
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::InvalidParameter(format!("coupling must be positive, got {g}")));
    }
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
    }
    Ok(())
}

/// Initial generators `X₀` and `X_j` on `n + 1` qubits.
pub fn initial_generators(n: usize) -> (PauliSum, Vec<PauliSum>) {
    let q = n + 1;
    let central = PauliSum::word(q, PauliWord::single(0, Pauli::X));
    let sats = (1..=n).map(|j| PauliSum::word(q, PauliWord::single(j, Pauli::X))).collect();
    (central, sats)
}

/// Generators at time `t` under the interaction with coupling `g`.
pub fn evolved_generators(n: usize, g: f64, t: f64, hbar: f64) -> Result<(PauliSum, Vec<PauliSum>)> {
    validate(n, g, hbar)?;
    let ham = DiagonalHamiltonian::cz_interaction(n, g);
    let (c, s) = initial_generators(n);
    Ok((c.heisenberg(&ham, t, hbar), s.iter().map(|x| x.heisenberg(&ham, t, hbar)).collect()))
}

pub fn heisenberg_stabilizer_evolution(n: usize, g: f64, times: &[f64], hbar: f64) -> Result<StabilizerTrajectory> {
    validate(n, g, hbar)?;
    let ham = DiagonalHamiltonian::cz_interaction(n, g);
    let (c0, s0) = initial_generators(n);
    let central = times.iter().map(|&t| c0.heisenberg(&ham, t, hbar)).collect();
    let satellites = s0.iter().map(|s| times.iter().map(|&t| s.heisenberg(&ham, t, hbar)).collect()).collect();
    Ok(StabilizerTrajectory { times: times.to_vec(), central, satellites })
}

/// Targets after an ideal controlled-Z layer: `X₀ Π Z_j` and `Z₀ X_j`.
pub fn cz_targets(n: usize) -> (PauliSum, Vec<PauliSum>) {
    let q = n + 1;
    let mut central = PauliWord::single(0, Pauli::X);
    for j in 1..=n {
        central = central.with_letter(j, Pauli::Z);
    }
    let sats = (1..=n).map(|j| PauliSum::word(q, PauliWord::from_pairs(&[(0, Pauli::Z), (j, Pauli::X)]))).collect();
    (PauliSum::word(q, central), sats)
}

/// Search window long enough to contain several candidate events.
fn window(g: f64, hbar: f64) -> f64 {
    4.0 * std::f64::consts::PI * hbar / g
}

/// First `t > 0` at which every satellite generator equals `Z₀ X_j`.
pub fn measured_cz_time(n: usize, g: f64, hbar: f64) -> Result<Option<f64>> {
    validate(n, g, hbar)?;
    let ham = DiagonalHamiltonian::cz_interaction(n, g);
    let (_, s0) = initial_generators(n);
    let (_, targets) = cz_targets(n);
    let distance = |t: f64| {
        s0.iter().zip(&targets).map(|(s, target)| s.heisenberg(&ham, t, hbar).distance(target).powi(2)).sum::<f64>().sqrt()
    };
    Ok(first_touchdown(distance, window(g, hbar), SEARCH_SAMPLES, MATCH_TOL))
}

/// First `t > 0` at which the central generator equals `X₀ Π Z_j`.
pub fn measured_central_cz_time(n: usize, g: f64, hbar: f64) -> Result<Option<f64>> {
    validate(n, g, hbar)?;
    let ham = DiagonalHamiltonian::cz_interaction(n, g);
    let (c0, _) = initial_generators(n);
    let (target, _) = cz_targets(n);
    Ok(first_touchdown(|t| c0.heisenberg(&ham, t, hbar).distance(&target), window(g, hbar), SEARCH_SAMPLES, MATCH_TOL))
}

/// First `t > 0` at which all generators return to their initial form.
pub fn measured_period(n: usize, g: f64, hbar: f64) -> Result<Option<f64>> {
    validate(n, g, hbar)?;
    let ham = DiagonalHamiltonian::cz_interaction(n, g);
    let (c0, s0) = initial_generators(n);
    let distance = |t: f64| {
        let mut acc = c0.heisenberg(&ham, t, hbar).distance(&c0).powi(2);
        for s in &s0 {
            acc += s.heisenberg(&ham, t, hbar).distance(s).powi(2);
        }
        acc.sqrt()
    };
    Ok(first_touchdown(distance, window(g, hbar), SEARCH_SAMPLES, MATCH_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;
    use std::f64::consts::PI;

    #[test]
    fn satellite_trajectory_has_expected_form() {
        // S_j(t) = cos²(2gt/ħ) X_j + sin²(2gt/ħ) Z₀X_j + ½ sin(4gt/ħ)(Y_j − Z₀Y_j)
        let (g, hbar) = (1.3, 0.8);
        for t in [0.1, 0.5, 1.7] {
            let (_, sats) = evolved_generators(2, g, t, hbar).unwrap();
            let a = 2.0 * g * t / hbar;
            let w = |pairs: &[(usize, Pauli)]| PauliWord::from_pairs(pairs);
            let expected = PauliSum::from_real(
                3,
                &[
                    (w(&[(1, Pauli::X)]), a.cos().powi(2)),
                    (w(&[(0, Pauli::Z), (1, Pauli::X)]), a.sin().powi(2)),
                    (w(&[(1, Pauli::Y)]), 0.5 * (2.0 * a).sin()),
                    (w(&[(0, Pauli::Z), (1, Pauli::Y)]), -0.5 * (2.0 * a).sin()),
                ],
            );
            assert!(sats[0].distance(&expected) < 1e-13, "{}", sats[0]);
        }
    }

    #[test]
    fn generators_stay_hermitian_and_commuting() {
        let times: Vec<f64> = (0..=32).map(|i| i as f64 * 0.05).collect();
        for n in [1, 2, 4] {
            let traj = heisenberg_stabilizer_evolution(n, 1.0, &times, 1.0).unwrap();
            assert!(traj.max_imag() < 1e-12);
            assert!(traj.max_commutator() < 1e-12);
            for s in traj.central.iter().chain(traj.satellites.iter().flatten()) {
                assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn measured_gate_time_and_period() {
        for n in [1, 2, 4] {
            let (g, hbar) = (1.0, 1.0);
            let t_cz = measured_cz_time(n, g, hbar).unwrap().unwrap();
            assert!((t_cz - PI / 4.0).abs() < 1e-9, "n={n}: {t_cz}");
            let t_central = measured_central_cz_time(n, g, hbar).unwrap().unwrap();
            assert!((t_central - PI / 4.0).abs() < 1e-9, "n={n}: {t_central}");
            let period = measured_period(n, g, hbar).unwrap().unwrap();
            assert!((period - PI / 2.0).abs() < 1e-9, "n={n}: {period}");
        }
    }

    #[test]
    fn gate_time_scales_with_hbar_over_g() {
        let t = measured_cz_time(1, 2.5, 0.4).unwrap().unwrap();
        assert!((t - PI * 0.4 / (4.0 * 2.5)).abs() < 1e-10);
    }

    #[test]
    fn zero_time_is_identity() {
        let (c, s) = evolved_generators(3, 1.0, 0.0, 1.0).unwrap();
        let (c0, s0) = initial_generators(3);
        assert_eq!(c, c0);
        assert_eq!(s, s0);
        assert!(c.scale(c64(2.0, 0.0)).distance(&c0) > 0.5);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(evolved_generators(0, 1.0, 0.1, 1.0).is_err());
        assert!(evolved_generators(1, 0.0, 0.1, 1.0).is_err());
        assert!(evolved_generators(1, 1.0, 0.1, -1.0).is_err());
    }
}
