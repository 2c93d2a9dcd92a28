//! Stabilizer generators of the star-graph protocol at each stage.
//!
//! The register is one central qubit (index 0) and `n` satellites (1..=n).
//! Starting from `|+⟩^{⊗(n+1)}`, the gate layers are: CZ from the centre to
//! every satellite, Hadamard on satellites, phase `diag(1, e^{iφ})` on
//! satellites, Hadamard on satellites, and CZ again.

use serde::{Deserialize, Serialize};

use super::pauli::{Gate, Pauli, PauliSum, PauliWord};
use crate::error::{Error, Result};

/// Largest satellite count for which expanded generators are built; the
/// central generator has `2^n` terms after the phase layer.
pub const MAX_EXPANDED_SATELLITES: usize = 12;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Stage {
    pub const ALL: [Stage; 6] = [Stage::A, Stage::B, Stage::C, Stage::D, Stage::E, Stage::F];

    pub fn label(self) -> char {
        match self {
            Stage::A => 'a',
            Stage::B => 'b',
            Stage::C => 'c',
            Stage::D => 'd',
            Stage::E => 'e',
            Stage::F => 'f',
        }
    }

    /// Gate layer that takes the previous stage to this one.
    pub fn layer(self, n: usize, phi: f64) -> Vec<Gate> {
        let sats = 1..=n;
        match self {
            Stage::A => Vec::new(),
            Stage::B | Stage::F => sats.map(|j| Gate::Cz(0, j)).collect(),
            Stage::C | Stage::E => sats.map(Gate::Hadamard).collect(),
            Stage::D => sats.map(|j| Gate::Phase(j, phi)).collect(),
        }
    }
}

/// Generators after one stage.
#[derive(Clone, Debug, PartialEq)]
pub struct StageGenerators {
    pub stage: Stage,
    /// Central generator, reduced on the satellite code space at the final stage.
    pub central: PauliSum,
    /// Central generator as obtained by conjugation alone.
    pub central_unreduced: PauliSum,
    pub satellites: Vec<PauliSum>,
}

impl StageGenerators {
    pub fn all(&self) -> impl Iterator<Item = &PauliSum> {
        std::iter::once(&self.central).chain(self.satellites.iter())
    }
}

/// Generators for stages (a) through (f).
pub fn stabilizer_stage_sequence(n: usize, phi: f64) -> Result<Vec<StageGenerators>> {
    if n == 0 {
        return Err(Error::InvalidParameter("at least one satellite is required".into()));
    }
    if n > MAX_EXPANDED_SATELLITES {
        return Err(Error::TooManyQubits { requested: n, max: MAX_EXPANDED_SATELLITES });
    }
    if !phi.is_finite() {
        return Err(Error::InvalidParameter(format!("phase must be finite, got {phi}")));
    }
    let q = n + 1;
    let mut central = PauliSum::word(q, PauliWord::single(0, Pauli::X));
    let mut satellites: Vec<PauliSum> = (1..=n).map(|j| PauliSum::word(q, PauliWord::single(j, Pauli::X))).collect();
    let mut out = Vec::with_capacity(Stage::ALL.len());
    for stage in Stage::ALL {
        let layer = stage.layer(n, phi);
        central = central.conjugate_all(&layer);
        satellites = satellites.iter().map(|s| s.conjugate_all(&layer)).collect();
        let reduced = if stage == Stage::F { reduce_on_satellites(&central, &satellites) } else { central.clone() };
        out.push(StageGenerators {
            stage,
            central: reduced,
            central_unreduced: central.clone(),
            satellites: satellites.clone(),
        });
    }
    Ok(out)
}

/// Drops single-letter satellite stabilizers from the central generator.
fn reduce_on_satellites(central: &PauliSum, satellites: &[PauliSum]) -> PauliSum {
    let singles: Vec<(usize, Pauli)> = satellites
        .iter()
        .filter_map(|s| {
            let mut terms = s.terms();
            let (w, c) = terms.next()?;
            if terms.next().is_some() || (c.re - 1.0).abs() > 1e-12 || c.im.abs() > 1e-12 || w.weight() != 1 {
                return None;
            }
            let q = w.support().trailing_zeros() as usize;
            Some((q, w.letter(q)))
        })
        .collect();
    central.reduce_by_single_qubit_stabilizers(&singles)
}
