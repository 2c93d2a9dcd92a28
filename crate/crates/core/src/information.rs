//! Classical and quantum Fisher information.

use serde::{Deserialize, Serialize};

use crate::distances::{DensityMatrix, ProbDist, SUPPORT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{eigh, ComplexMatrix, SpectralDecomposition, C64, PSD_CLAMP};

/// Tolerance on `Σ E_j = 𝕀`.
pub const POVM_COMPLETENESS_TOL: f64 = 1e-10;
/// Eigenvalue pairs closer than this carry no QFI weight.
pub const DEGENERACY_TOL: f64 = 1e-14;

/// Positive operator-valued measure with discrete outcomes.
#[derive(Clone, Debug)]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let first = elements.first().ok_or_else(|| Error::InvalidPovm("no elements".into()))?;
        let dim = first.dim();
        let mut total = ComplexMatrix::zeros(dim);
        for (j, e) in elements.iter().enumerate() {
            if e.dim() != dim {
                return Err(Error::DimMismatch { expected: dim, found: e.dim() });
            }
            let spectral = eigh(e).map_err(|err| Error::InvalidPovm(format!("element {j}: {err}")))?;
            if spectral.eigenvalues[0] < -PSD_CLAMP {
                return Err(Error::InvalidPovm(format!(
                    "element {j} has negative eigenvalue {:e}",
                    spectral.eigenvalues[0]
                )));
            }
            total = &total + e;
        }
        let residual = (&total - &ComplexMatrix::identity(dim)).frobenius_norm();
        if residual > POVM_COMPLETENESS_TOL {
            return Err(Error::InvalidPovm(format!("elements sum to identity only within {residual:e}")));
        }
        Ok(Self { elements })
    }

    /// Projective measurement onto the columns of a unitary.
    pub fn projective(basis: &ComplexMatrix) -> Result<Self> {
        let elements = (0..basis.dim())
            .map(|j| {
                let v = basis.column(j);
                ComplexMatrix::outer(&v, &v)
            })
            .collect();
        Self::new(elements)
    }

    pub fn computational(dim: usize) -> Self {
        Self::projective(&ComplexMatrix::identity(dim)).expect("identity basis is complete")
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }
}

/// Hermitian generator with its spectral decomposition computed once at construction.
#[derive(Clone, Debug)]
pub struct Observable {
    mat: ComplexMatrix,
    spectral: SpectralDecomposition,
}

impl Observable {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let spectral = eigh(&mat)?;
        Ok(Self { mat: mat.hermitian_part(), spectral })
    }

    pub fn diagonal(levels: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diagonal(levels))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectral.eigenvalues
    }

    pub fn ground_energy(&self) -> f64 {
        self.spectral.eigenvalues[0]
    }

    pub fn max_energy(&self) -> f64 {
        *self.spectral.eigenvalues.last().expect("nonempty spectrum")
    }

    /// `K + c𝕀`
    pub fn shifted(&self, c: f64) -> Result<Self> {
        Self::new(&self.mat + &ComplexMatrix::identity(self.dim()).scale_real(c))
    }

    pub fn scaled(&self, a: f64) -> Result<Self> {
        Self::new(self.mat.scale_real(a))
    }

    /// Populations `<v_k|ρ|v_k>` of the eigenvectors of `K`.
    pub fn populations(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        check_dims(self.dim(), rho.dim())?;
        let rt = self.spectral.to_eigenbasis(rho.matrix());
        Ok((0..self.dim()).map(|k| rt.get(k, k).re).collect())
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimMismatch { expected, found });
    }
    Ok(())
}

/// `p_j = Tr[E_j ρ]`, with rounding negatives clamped and the vector renormalised.
pub fn born_probabilities(rho: &DensityMatrix, povm: &Povm) -> Result<ProbDist> {
    check_dims(povm.dim(), rho.dim())?;
    let mut probs = Vec::with_capacity(povm.elements().len());
    for (j, e) in povm.elements().iter().enumerate() {
        let p = e.trace_product(rho.matrix()).re;
        if p < -PSD_CLAMP {
            return Err(Error::InvalidPovm(format!("outcome {j} has probability {p:e}")));
        }
        probs.push(p.max(0.0));
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    if probs.len() < 2 {
        // single-outcome measurements carry no information; pad to a valid distribution
        probs.push(0.0);
    }
    ProbDist::new(probs)
}

/// Default finite-difference step for [`classical_fisher`].
pub fn default_fd_step(theta: f64) -> f64 {
    1e-5 * theta.abs().max(1.0)
}

/// `Σ_j (dp_j/dθ)² / p_j` with central differences of step `h`.
///
/// An outcome whose probability vanishes at `θ` but not at `θ ± h` makes the
/// formula ill-defined and is reported as [`Error::ZeroProbabilityOutcome`].
pub fn classical_fisher<F>(rho_of_theta: F, povm: &Povm, theta: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<DensityMatrix>,
{
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!("finite-difference step must be positive, got {h}")));
    }
    let p0 = born_probabilities(&rho_of_theta(theta)?, povm)?;
    let plus = born_probabilities(&rho_of_theta(theta + h)?, povm)?;
    let minus = born_probabilities(&rho_of_theta(theta - h)?, povm)?;
    let mut acc = 0.0;
    for (outcome, ((&p, &pp), &pm)) in p0.probs().iter().zip(plus.probs()).zip(minus.probs()).enumerate() {
        if p <= SUPPORT_TOL {
            if pp > SUPPORT_TOL || pm > SUPPORT_TOL {
                return Err(Error::ZeroProbabilityOutcome { outcome });
            }
            continue;
        }
        let dp = (pp - pm) / (2.0 * h);
        acc += dp * dp / p;
    }
    Ok(acc)
}

/// Quantum Fisher information for the unitary family `e^{−iKθ/ħ} ρ e^{iKθ/ħ}`:
/// `(2/ħ²) Σ_jk (p_j − p_k)² / (p_j + p_k) · |K_jk|²` in the eigenbasis of `ρ`.
pub fn qfi(rho: &DensityMatrix, k: &Observable, hbar: f64) -> Result<f64> {
    check_dims(k.dim(), rho.dim())?;
    let spectral = rho.spectrum()?;
    let p = &spectral.eigenvalues;
    let kt = spectral.to_eigenbasis(k.matrix());
    let mut acc = 0.0;
    for a in 0..p.len() {
        for b in 0..p.len() {
            let sum = p[a] + p[b];
            let diff = p[a] - p[b];
            if sum <= SUPPORT_TOL || diff.abs() <= DEGENERACY_TOL {
                continue;
            }
            acc += diff * diff / sum * kt.get(a, b).norm_sqr();
        }
    }
    Ok(2.0 * acc / (hbar * hbar))
}

/// `<K²> − <K>²`, evaluated as `Σ_k w_k (λ_k − <K>)²` over the spectrum of `K`.
pub fn variance(rho: &DensityMatrix, k: &Observable) -> Result<f64> {
    let w = k.populations(rho)?;
    let lambdas = k.eigenvalues();
    let mean: f64 = w.iter().zip(lambdas).map(|(w, l)| w * l).sum();
    let var: f64 = w.iter().zip(lambdas).map(|(w, l)| w * (l - mean) * (l - mean)).sum();
    Ok(var.max(0.0))
}

/// `<K>`
pub fn mean(rho: &DensityMatrix, k: &Observable) -> Result<f64> {
    let w = k.populations(rho)?;
    Ok(w.iter().zip(k.eigenvalues()).map(|(w, l)| w * l).sum())
}

/// QFI next to its variance bound `4·Var(K)/ħ²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QfiGap {
    pub qfi: f64,
    pub bound: f64,
}

impl QfiGap {
    pub fn gap(&self) -> f64 {
        self.bound - self.qfi
    }
}

pub fn qfi_variance_gap(rho: &DensityMatrix, k: &Observable, hbar: f64) -> Result<QfiGap> {
    Ok(QfiGap { qfi: qfi(rho, k, hbar)?, bound: 4.0 * variance(rho, k)? / (hbar * hbar) })
}

/// `ρ′ = (1/iħ)[K, ρ]`, the tangent of the unitary orbit.
pub fn orbit_tangent(rho: &DensityMatrix, k: &Observable, hbar: f64) -> ComplexMatrix {
    k.matrix().commutator(rho.matrix()).scale(C64::new(0.0, -1.0 / hbar))
}
