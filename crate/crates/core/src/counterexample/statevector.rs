//! Dense statevector simulation of the star-graph protocol.

use super::pauli::{Gate, PauliSum};
use super::stabilizer::Stage;
use crate::distances::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{c64, inner, ComplexMatrix, C64};

/// Satellite count above which the dense register is refused.
pub const MAX_SATELLITES: usize = 20;

/// Statevector with qubit 0 on the most significant index bit.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|+⟩^{⊗n}`
    pub fn plus_product(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let a = c64(1.0 / (dim as f64).sqrt(), 0.0);
        Self { n_qubits, amps: vec![a; dim] }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    fn bit(&self, q: usize) -> usize {
        1usize << (self.n_qubits - 1 - q)
    }

    pub fn apply_single(&mut self, q: usize, u: &ComplexMatrix) {
        let bit = self.bit(q);
        let (u00, u01, u10, u11) = (u.get(0, 0), u.get(0, 1), u.get(1, 0), u.get(1, 1));
        for i0 in 0..self.amps.len() {
            if i0 & bit != 0 {
                continue;
            }
            let i1 = i0 | bit;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = u00 * a0 + u01 * a1;
            self.amps[i1] = u10 * a0 + u11 * a1;
        }
    }

    /// Two-qubit gate with qubit `a` as the high bit of the 4x4 block.
    pub fn apply_two(&mut self, a: usize, b: usize, u: &ComplexMatrix) {
        let (ba, bb) = (self.bit(a), self.bit(b));
        for base in 0..self.amps.len() {
            if base & (ba | bb) != 0 {
                continue;
            }
            let idx = [base, base | bb, base | ba, base | ba | bb];
            let old = idx.map(|i| self.amps[i]);
            for (r, &i) in idx.iter().enumerate() {
                self.amps[i] = (0..4).map(|c| u.get(r, c) * old[c]).sum();
            }
        }
    }

    pub fn apply_gate(&mut self, gate: Gate) {
        let u = gate.local_matrix();
        match gate {
            Gate::Hadamard(q) | Gate::Phase(q, _) => self.apply_single(q, &u),
            Gate::Cz(a, b) => self.apply_two(a, b, &u),
        }
    }

    pub fn overlap(&self, other: &Self) -> C64 {
        inner(&self.amps, &other.amps)
    }

    /// `‖S ψ − ψ‖` for a candidate stabilizer `S`.
    pub fn stabilizer_residual(&self, s: &PauliSum) -> f64 {
        let applied = s.apply(&self.amps);
        applied.iter().zip(&self.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Reduced state of qubit 0.
    pub fn reduced_first_qubit(&self) -> DensityMatrix {
        let half = self.amps.len() / 2;
        let (lo, hi) = self.amps.split_at(half);
        let r00: f64 = lo.iter().map(|a| a.norm_sqr()).sum();
        let r11: f64 = hi.iter().map(|a| a.norm_sqr()).sum();
        let r01: C64 = lo.iter().zip(hi).map(|(a, b)| a * b.conj()).sum();
        let m = ComplexMatrix::from_row_slice(2, &[c64(r00, 0.0), r01, r01.conj(), c64(r11, 0.0)]).expect("finite reduced state");
        DensityMatrix::from_matrix_unchecked(m)
    }

    /// `⟨+|ρ₀|+⟩` for the reduced state of qubit 0, as `½ Σ_s |ψ_{0s} + ψ_{1s}|²`
    /// so that a vanishing value carries no cancellation error.
    pub fn central_plus_population(&self) -> f64 {
        let half = self.amps.len() / 2;
        let (lo, hi) = self.amps.split_at(half);
        0.5 * lo.iter().zip(hi).map(|(a, b)| (a + b).norm_sqr()).sum::<f64>()
    }

    /// `|⟨ψ|(|ξ⟩_0 ⊗ |+⟩^{⊗n})|²` for the given central amplitudes `ξ`.
    pub fn product_overlap_with_plus_satellites(&self, central: [C64; 2]) -> f64 {
        let half = self.amps.len() / 2;
        let sat = c64(1.0 / (half as f64).sqrt(), 0.0);
        let (lo, hi) = self.amps.split_at(half);
        let amp: C64 = lo.iter().map(|a| a.conj() * central[0] * sat).sum::<C64>()
            + hi.iter().map(|a| a.conj() * central[1] * sat).sum::<C64>();
        amp.norm_sqr()
    }
}

/// States after each stage, starting from `|+⟩^{⊗(n+1)}`.
pub fn stage_states(n: usize, phi: f64) -> Result<Vec<(Stage, StateVector)>> {
    validate_size(n)?;
    let mut psi = StateVector::plus_product(n + 1);
    let mut out = Vec::with_capacity(Stage::ALL.len());
    for stage in Stage::ALL {
        for gate in stage.layer(n, phi) {
            psi.apply_gate(gate);
        }
        out.push((stage, psi.clone()));
    }
    Ok(out)
}

fn validate_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("at least one satellite is required".into()));
    }
    if n > MAX_SATELLITES {
        return Err(Error::TooManyQubits { requested: n, max: MAX_SATELLITES });
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct StatevectorOutcome {
    pub final_central: DensityMatrix,
    /// Overlap of the final state with `(central state) ⊗ |+⟩^{⊗n}`; 1 when the satellites are restored.
    pub satellite_overlap: f64,
    /// `|⟨+|ψ⟩|` on the central qubit, i.e. `√⟨+|ρ_central|+⟩`.
    pub overlap_with_initial: f64,
    pub final_amplitudes: [C64; 2],
}

/// Runs the full protocol and summarises the central qubit.
pub fn statevector_run(n: usize, phi: f64) -> Result<StatevectorOutcome> {
    validate_size(n)?;
    let mut psi = StateVector::plus_product(n + 1);
    for stage in Stage::ALL {
        for gate in stage.layer(n, phi) {
            psi.apply_gate(gate);
        }
    }
    let rho = psi.reduced_first_qubit();
    // leading eigenvector of the central state, phase fixed on |0⟩
    let m = rho.matrix();
    let (r00, r01) = (m.get(0, 0).re, m.get(0, 1));
    let xi = if r00 > 1e-12 {
        let a0 = r00.sqrt();
        [c64(a0, 0.0), r01.conj() / a0]
    } else {
        [C64::ZERO, C64::ONE]
    };
    let satellite_overlap = psi.product_overlap_with_plus_satellites(xi);
    let overlap_with_initial = psi.central_plus_population().sqrt();
    Ok(StatevectorOutcome { final_central: rho, satellite_overlap, overlap_with_initial, final_amplitudes: xi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn canonical_phase_flips_central_qubit() {
        for n in [1, 2, 4, 8] {
            let out = statevector_run(n, PI / n as f64).unwrap();
            assert!(out.overlap_with_initial < 1e-12, "n={n}: {}", out.overlap_with_initial);
            assert!((out.satellite_overlap - 1.0).abs() < 1e-12);
            let m = out.final_central.matrix();
            // |−⟩⟨−|
            assert!((m.get(0, 1).re + 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn central_phase_accumulates() {
        let (n, phi) = (3, 0.4);
        let out = statevector_run(n, phi).unwrap();
        let m = out.final_central.matrix();
        // (|0⟩ + e^{iNφ}|1⟩)/√2 has ρ_01 = e^{−iNφ}/2
        let expected = C64::from_polar(0.5, -(n as f64) * phi);
        assert!((m.get(0, 1) - expected).norm() < 1e-12);
        assert!((out.overlap_with_initial - ((n as f64 * phi) / 2.0).cos().abs()).abs() < 1e-12);
    }

    #[test]
    fn zero_phase_restores_initial_state() {
        let out = statevector_run(3, 0.0).unwrap();
        assert!((out.overlap_with_initial - 1.0).abs() < 1e-14);
        assert!((out.satellite_overlap - 1.0).abs() < 1e-14);
        let psi = stage_states(3, 0.0).unwrap().pop().unwrap().1;
        let initial = StateVector::plus_product(4);
        assert!((psi.overlap(&initial).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn matches_brute_force_two_qubit_product() {
        // n = 1, φ = π: CZ · (I⊗H) · (I⊗P) · (I⊗H) · CZ on |++⟩
        use crate::linalg::{controlled_z, hadamard, phase_gate};
        let id = ComplexMatrix::identity(2);
        let layers = [
            controlled_z(),
            id.kron(&hadamard()),
            id.kron(&phase_gate(PI)),
            id.kron(&hadamard()),
            controlled_z(),
        ];
        let mut v = StateVector::plus_product(2).amps().to_vec();
        for u in &layers {
            v = u.apply(&v);
        }
        let psi = stage_states(1, PI).unwrap().pop().unwrap().1;
        for (a, b) in psi.amps().iter().zip(&v) {
            assert!((a - b).norm() < 1e-15);
        }
        assert!(statevector_run(1, PI).unwrap().overlap_with_initial <= 1e-10);
    }

    #[test]
    fn two_qubit_gate_matches_kron() {
        let mut psi = StateVector::plus_product(2);
        psi.apply_single(1, &crate::linalg::phase_gate(0.3));
        let reference = crate::linalg::controlled_z().apply(psi.amps());
        psi.apply_gate(Gate::Cz(0, 1));
        for (a, b) in psi.amps().iter().zip(&reference) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn rejects_oversized_registers() {
        assert!(matches!(statevector_run(21, 0.1), Err(Error::TooManyQubits { requested: 21, max: 20 })));
        assert!(statevector_run(0, 0.1).is_err());
    }
}
