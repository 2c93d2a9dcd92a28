//! Statistical distances between probability distributions and quantum states.
//!
//! The classical side works on the probability simplex with the metric
//! `ds² = Σ dp_j² / p_j`. Through the amplitudes `r_j = √p_j` this is four times
//! the Euclidean metric on the unit sphere, which gives the finite geodesic
//! `2·arccos Σ √(p_j q_j)`.
//!
//! The quantum side uses the raising superoperator `R_ρ(B) = ½{ρ, B}` and its
//! inverse `L_ρ` on the support of `ρ`; the infinitesimal distance is
//! `Tr[dρ L_ρ(dρ)]`. Finite distances are the Wootters angle for pure states and
//! the Bures angle `arccos √F` for density matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c64, eigh, ComplexMatrix, SpectralDecomposition, C64, HERMITIAN_TOL};

/// Pairs of eigenvalues with `p_j + p_k` at or below this are off the support.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Entries allowed outside the support before an operator is rejected.
pub const OFF_SUPPORT_TOL: f64 = 1e-10;
/// Normalisation tolerance for probability vectors, states and traces.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Tolerance on `Σ dp_j` and `Tr dρ` for tangent vectors.
pub const TANGENT_TOL: f64 = 1e-10;
/// Eigenvalues of a density matrix below this are treated as exact zeros
/// when forming the square roots inside the fidelity.
const FIDELITY_RANK_TOL: f64 = 1e-14;

/// A point on the probability simplex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbDist(Vec<f64>);

impl ProbDist {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidProbDist(format!("need at least 2 outcomes, got {}", probs.len())));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidProbDist(format!("entry {i} is {p}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidProbDist(format!("entries sum to {sum}")));
        }
        Ok(Self(probs))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Unit vector in `C^dim`. Global phase is never compared componentwise.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState(Vec<C64>);

impl PureState {
    /// Accepts amplitudes whose norm is 1 within 1e-12, then renormalises exactly.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let n = linalg::norm(&amps);
        if amps.is_empty() {
            return Err(Error::InvalidState("empty amplitude vector".into()));
        }
        if !n.is_finite() || (n - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidState(format!("norm is {n}, expected 1")));
        }
        Ok(Self(amps.into_iter().map(|a| a / n).collect()))
    }

    /// Normalises an arbitrary nonzero vector.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let n = linalg::norm(&amps);
        if amps.is_empty() || !n.is_finite() || n == 0.0 {
            return Err(Error::InvalidState("cannot normalise a zero or non-finite vector".into()));
        }
        Ok(Self(amps.into_iter().map(|a| a / n).collect()))
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut amps = vec![C64::ZERO; dim];
        amps[index] = C64::ONE;
        Ok(Self(amps))
    }

    /// `(|0> + |1>)/√2`
    pub fn plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self(vec![c64(s, 0.0), c64(s, 0.0)])
    }

    /// `(|0> − |1>)/√2`
    pub fn minus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self(vec![c64(s, 0.0), c64(-s, 0.0)])
    }

    pub fn amps(&self) -> &[C64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `<self|other>`
    pub fn overlap(&self, other: &Self) -> Result<C64> {
        check_dims(self.dim(), other.dim())?;
        Ok(linalg::inner(&self.0, &other.0))
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix(ComplexMatrix::outer(&self.0, &self.0))
    }
}

/// Hermitian, unit-trace, positive semi-definite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        mat.ensure_hermitian()?;
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > NORMALIZATION_TOL || tr.im.abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let spectral = eigh(&mat)?;
        linalg::check_psd(&spectral.eigenvalues)?;
        Ok(Self(mat.hermitian_part()))
    }

    pub fn from_pure(psi: &PureState) -> Self {
        psi.to_density()
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn diagonal(p: &ProbDist) -> Self {
        Self(ComplexMatrix::from_real_diagonal(p.probs()))
    }

    /// Mixture `Σ w_i |ψ_i><ψ_i|`; weights must form a distribution.
    pub fn mixture(weights: &ProbDist, states: &[PureState]) -> Result<Self> {
        if weights.len() != states.len() {
            return Err(Error::DimMismatch { expected: weights.len(), found: states.len() });
        }
        let dim = states[0].dim();
        let mut acc = ComplexMatrix::zeros(dim);
        for (w, s) in weights.probs().iter().zip(states) {
            check_dims(dim, s.dim())?;
            acc = &acc + &s.to_density().0.scale_real(*w);
        }
        Self::new(acc)
    }

    /// Wraps a matrix known to be a density matrix up to rounding.
    pub(crate) fn from_matrix_unchecked(mat: ComplexMatrix) -> Self {
        Self(mat.hermitian_part())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn purity(&self) -> f64 {
        self.0.trace_product(&self.0).re
    }

    pub fn spectrum(&self) -> Result<SpectralDecomposition> {
        eigh(&self.0)
    }
}

/// Scaling convention for angles between states.
///
/// `WoottersAngle` runs over `[0, π/2]`; `FisherAngle` is twice as large and
/// matches `ds² = Σ dp²/p` exactly, so orthogonal states sit at `π`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceConvention {
    FisherAngle,
    #[default]
    WoottersAngle,
}

impl DistanceConvention {
    pub fn scale(self) -> f64 {
        match self {
            Self::FisherAngle => 2.0,
            Self::WoottersAngle => 1.0,
        }
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimMismatch { expected, found });
    }
    Ok(())
}

/// `Σ_j dp_j² / p_j` over the support of `p`.
pub fn classical_infinitesimal_distance_sq(p: &ProbDist, dp: &[f64]) -> Result<f64> {
    check_dims(p.len(), dp.len())?;
    let sum: f64 = dp.iter().sum();
    if sum.abs() > TANGENT_TOL {
        return Err(Error::OffSimplexTangent { sum });
    }
    let mut acc = 0.0;
    for (index, (&pj, &dpj)) in p.probs().iter().zip(dp).enumerate() {
        if pj == 0.0 {
            if dpj != 0.0 {
                return Err(Error::DivergentDirection { index, value: dpj });
            }
            continue;
        }
        acc += dpj * dpj / pj;
    }
    Ok(acc)
}

/// Finite geodesic distance `2·arccos Σ √(p_j q_j)`, in `[0, π]`.
///
/// Evaluated as twice the angle between the unit vectors `√p` and `√q`,
/// `2·asin(‖√p − √q‖/2)`, which keeps full relative precision for nearby points.
pub fn classical_geodesic_distance(p: &ProbDist, q: &ProbDist) -> Result<f64> {
    check_dims(p.len(), q.len())?;
    let chord: f64 = p.probs().iter().zip(q.probs()).map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2)).sum::<f64>().sqrt();
    Ok(2.0 * chord_angle(chord))
}

/// Point at fraction `t ∈ [0, 1]` along the geodesic from `p` to `q`: the
/// squared great-circle interpolation of the amplitude vectors `√p`, `√q`.
pub fn classical_geodesic_point(p: &ProbDist, q: &ProbDist, t: f64) -> Result<Vec<f64>> {
    check_dims(p.len(), q.len())?;
    let omega = 0.5 * classical_geodesic_distance(p, q)?;
    let (wa, wb) = if omega < 1e-12 {
        (1.0 - t, t)
    } else {
        (((1.0 - t) * omega).sin() / omega.sin(), (t * omega).sin() / omega.sin())
    };
    Ok(p.probs().iter().zip(q.probs()).map(|(a, b)| (wa * a.sqrt() + wb * b.sqrt()).powi(2)).collect())
}

/// Length of a path `t ↦ p(t)`, `t ∈ [0, 1]`, under `ds² = Σ dp²/p`.
///
/// Composite Simpson quadrature over `steps` intervals (rounded up to even),
/// with central-difference velocities of step `1e-6`.
pub fn classical_path_length(path: impl Fn(f64) -> Vec<f64>, steps: usize) -> f64 {
    let steps = (steps.max(2) + 1) & !1;
    let h = 1e-6;
    let speed = |t: f64| {
        let p = path(t);
        let (lo, hi) = ((t - h).max(0.0), (t + h).min(1.0));
        let (pl, ph) = (path(lo), path(hi));
        p.iter().zip(pl.iter().zip(&ph)).map(|(pk, (a, b))| ((b - a) / (hi - lo)).powi(2) / pk).sum::<f64>().sqrt()
    };
    let dt = 1.0 / steps as f64;
    let mut acc = speed(0.0) + speed(1.0);
    for i in 1..steps {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * speed(i as f64 * dt);
    }
    acc * dt / 3.0
}

/// Angle between unit vectors separated by a chord of length `d`.
fn chord_angle(d: f64) -> f64 {
    2.0 * (0.5 * d).clamp(0.0, 1.0).asin()
}

fn ensure_hermitian_operand(b: &ComplexMatrix, dim: usize) -> Result<()> {
    check_dims(dim, b.dim())?;
    b.ensure_hermitian()
}

/// `R_ρ(B) = ½{ρ, B}`, evaluated in the eigenbasis of `ρ` as `½(p_j + p_k) B_jk`.
pub fn raising_superop(rho: &DensityMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_hermitian_operand(b, rho.dim())?;
    let spectral = rho.spectrum()?;
    let p = &spectral.eigenvalues;
    let bt = spectral.to_eigenbasis(b);
    let rt = ComplexMatrix::from_fn(p.len(), |j, k| bt.get(j, k) * (0.5 * (p[j] + p[k])));
    Ok(spectral.from_eigenbasis(&rt))
}

/// Eigenbasis entries of `b` with the support check applied.
fn support_weighted<F>(spectral: &SpectralDecomposition, b: &ComplexMatrix, mut visit: F) -> Result<()>
where
    F: FnMut(usize, usize, C64, f64),
{
    let p = &spectral.eigenvalues;
    let bt = spectral.to_eigenbasis(b);
    for j in 0..p.len() {
        for k in 0..p.len() {
            let s = p[j] + p[k];
            let entry = bt.get(j, k);
            if s <= SUPPORT_TOL {
                if entry.norm() > OFF_SUPPORT_TOL {
                    return Err(Error::OutsideSupport { row: j, col: k, value: entry.norm() });
                }
                continue;
            }
            visit(j, k, entry, s);
        }
    }
    Ok(())
}

/// `L_ρ(B) = R_ρ⁻¹(B)` on the support: eigenbasis entries `2 B_jk / (p_j + p_k)`.
pub fn lowering_superop(rho: &DensityMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_hermitian_operand(b, rho.dim())?;
    let spectral = rho.spectrum()?;
    let mut lt = ComplexMatrix::zeros(rho.dim()).into_dmatrix();
    support_weighted(&spectral, b, |j, k, entry, s| lt[(j, k)] = entry * (2.0 / s))?;
    Ok(spectral.from_eigenbasis(&ComplexMatrix::from_dmatrix(lt)?))
}

/// `ds² = Tr[dρ L_ρ(dρ)] = Σ_jk 2|dρ_jk|² / (p_j + p_k)` in the eigenbasis of `ρ`.
pub fn quantum_infinitesimal_distance_sq(rho: &DensityMatrix, drho: &ComplexMatrix) -> Result<f64> {
    ensure_hermitian_operand(drho, rho.dim())?;
    let trace = drho.trace();
    if trace.norm() > TANGENT_TOL {
        return Err(Error::NotTraceless { trace: trace.norm() });
    }
    let spectral = rho.spectrum()?;
    let mut acc = 0.0;
    support_weighted(&spectral, drho, |_, _, entry, s| acc += 2.0 * entry.norm_sqr() / s)?;
    Ok(acc)
}

/// `arccos |<ψ|φ>|`, in `[0, π/2]`, evaluated from the chord `‖ψ − e^{iα}φ‖`
/// at the phase that makes the overlap real.
pub fn wootters_distance(psi: &PureState, phi: &PureState) -> Result<f64> {
    let overlap = psi.overlap(phi)?;
    let w = if overlap.norm() > 0.0 { overlap.conj() / overlap.norm() } else { C64::ONE };
    let chord = psi.amps().iter().zip(phi.amps()).map(|(a, b)| (a - w * b).norm_sqr()).sum::<f64>().sqrt();
    Ok(chord_angle(chord))
}

/// Uhlmann fidelity `[Tr √(√ρ σ √ρ)]²`.
///
/// The outer square root is taken of whichever state has the smaller numerical
/// rank, and the inner matrix is compressed onto that support. For a pure
/// argument this reduces to the exact scalar `<ψ|σ|ψ>`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    let sr = rho.spectrum()?;
    let ss = sigma.spectrum()?;
    linalg::check_psd(&sr.eigenvalues)?;
    linalg::check_psd(&ss.eigenvalues)?;
    let rank = |s: &SpectralDecomposition| s.eigenvalues.iter().filter(|&&p| p > FIDELITY_RANK_TOL).count();
    let (outer, inner) = if rank(&sr) <= rank(&ss) { (&sr, sigma) } else { (&ss, rho) };
    Ok(fidelity_compressed(outer, inner.matrix()))
}

/// `[Tr √(D^{½} W† σ W D^{½})]²` where `W`, `D` span the support of the outer state.
pub(crate) fn fidelity_compressed(outer: &SpectralDecomposition, inner: &ComplexMatrix) -> f64 {
    let support: Vec<usize> = (0..outer.dim()).filter(|&j| outer.eigenvalues[j] > FIDELITY_RANK_TOL).collect();
    if support.is_empty() {
        return 0.0;
    }
    let cols: Vec<Vec<C64>> = support.iter().map(|&j| outer.eigenvectors.column(j)).collect();
    let roots: Vec<f64> = support.iter().map(|&j| outer.eigenvalues[j].sqrt()).collect();
    let r = support.len();
    let compressed = ComplexMatrix::from_fn(r, |a, b| {
        let sb = inner.apply(&cols[b]);
        linalg::inner(&cols[a], &sb) * (roots[a] * roots[b])
    });
    let root_trace: f64 = if r == 1 {
        compressed.get(0, 0).re.max(0.0).sqrt()
    } else {
        match eigh(&compressed.hermitian_part()) {
            Ok(s) => s.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).sum(),
            Err(_) => return f64::NAN,
        }
    };
    (root_trace * root_trace).clamp(0.0, 1.0)
}

/// Bures angle `arccos √F`, scaled by the requested convention.
pub fn bures_angle(rho: &DensityMatrix, sigma: &DensityMatrix, conv: DistanceConvention) -> Result<f64> {
    let f = fidelity(rho, sigma)?;
    if f.is_nan() {
        return Err(Error::ConvergenceFailure);
    }
    Ok(conv.scale() * f.sqrt().clamp(0.0, 1.0).acos())
}

/// Checks `M` is Hermitian and traceless; used for tangent operators built elsewhere.
pub fn is_hermitian_traceless(m: &ComplexMatrix) -> bool {
    m.hermitian_residual() <= HERMITIAN_TOL && m.trace().norm() <= TANGENT_TOL
}

/// Embeds a probability vector as a diagonal operator; convenient for tangent vectors.
pub fn diagonal_operator(values: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_real_diagonal(values)
}
