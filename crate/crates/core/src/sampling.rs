//! Seeded random states, generators and measurements for property sweeps.
//!
//! All samplers take a caller-supplied RNG; reproducible runs use
//! [`rng_for`] which derives a `ChaCha8Rng` stream from `(seed, index)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::distances::{DensityMatrix, PureState};
use crate::information::Povm;
use crate::linalg::{c64, eigh, ComplexMatrix, C64};

/// Independent RNG stream for item `index` of a seeded sweep.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Vec<Vec<C64>> {
    (0..rows).map(|_| (0..cols).map(|_| gaussian(rng)).collect()).collect()
}

/// Haar-random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    let amps: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
    PureState::normalized(amps).expect("gaussian vector is nonzero")
}

/// GUE-distributed Hermitian matrix `(A + A†)/2`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let a = ginibre(dim, dim, rng);
    ComplexMatrix::from_fn(dim, |i, j| (a[i][j] + a[j][i].conj()) * 0.5)
}

/// `G G† / Tr(G G†)` with `G` of shape `dim x rank`.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(dim, rank.max(1), rng);
    let m = ComplexMatrix::from_fn(dim, |i, j| g[i].iter().zip(&g[j]).map(|(a, b)| a * b.conj()).sum());
    let tr = m.trace().re;
    DensityMatrix::from_matrix_unchecked(m.scale_real(1.0 / tr))
}

/// Random unitary from the eigenvectors of a GUE matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let h = random_hermitian(dim, rng);
    let mut v = eigh(&h).expect("GUE sample is Hermitian").eigenvectors.into_dmatrix();
    for mut col in v.column_iter_mut() {
        let phase = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
        col.iter_mut().for_each(|z| *z *= phase);
    }
    ComplexMatrix::from_dmatrix(v).expect("finite unitary")
}

/// `count`-outcome POVM `E_j = S^{-½} A_j S^{-½}` with `A_j` random PSD and `S = Σ A_j`.
pub fn random_povm<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> Povm {
    let raw: Vec<ComplexMatrix> =
        (0..count).map(|_| random_density_matrix(dim, dim, rng).matrix().clone()).collect();
    let mut total = ComplexMatrix::zeros(dim);
    for a in &raw {
        total = &total + a;
    }
    let spectral = eigh(&total).expect("sum of PSD matrices is Hermitian");
    let inv_sqrt = spectral.map_eigenvalues(|l| c64(1.0 / l.sqrt(), 0.0));
    let elements = raw.iter().map(|a| (&(&inv_sqrt * a) * &inv_sqrt).hermitian_part()).collect();
    Povm::new(elements).expect("normalised POVM")
}

/// A pure state and generator built to become orthogonal at a known parameter.
#[derive(Clone, Debug)]
pub struct OrthogonalizingScenario {
    pub state: PureState,
    pub generator: ComplexMatrix,
    /// A parameter value at which the overlap vanishes exactly; the first
    /// orthogonality time is at or before it.
    pub designed_theta: f64,
}

/// Random pure scenario in `dim >= 2` dimensions that reaches orthogonality.
///
/// The spectrum is equally spaced, `λ_k = ω k + c`, on random eigenvectors, and
/// the populations are the coefficients of `½(1 + z^m) Q(z)` for a random
/// nonnegative polynomial `Q`. The overlap `Σ p_k e^{−iλ_k θ/ħ}` then carries the
/// factor `1 + e^{−imωθ/ħ}`, which vanishes at `θ = πħ/(mω)`.
pub fn orthogonalizing_pure_scenario<R: Rng + ?Sized>(dim: usize, hbar: f64, rng: &mut R) -> OrthogonalizingScenario {
    assert!(dim >= 2, "orthogonality needs at least two levels");
    let omega = rng.random_range(0.5..2.0);
    let offset = rng.random_range(-1.0..1.0);
    let m = rng.random_range(1..dim);
    let q_degree = rng.random_range(0..dim - m);
    let q: Vec<f64> = (0..=q_degree).map(|i| if i == 0 { rng.random_range(0.1..1.0) } else { rng.random_range(0.0..1.0) }).collect();
    let mut p = vec![0.0; dim];
    for (i, &qi) in q.iter().enumerate() {
        p[i] += 0.5 * qi;
        p[i + m] += 0.5 * qi;
    }
    let total: f64 = p.iter().sum();
    let v = random_unitary(dim, rng);
    let mut amps = vec![C64::ZERO; dim];
    for (k, &pk) in p.iter().enumerate() {
        let c = C64::from_polar((pk / total).sqrt(), rng.random_range(0.0..std::f64::consts::TAU));
        for (row, a) in amps.iter_mut().enumerate() {
            *a += v.get(row, k) * c;
        }
    }
    let lambdas: Vec<f64> = (0..dim).map(|k| omega * k as f64 + offset).collect();
    let generator = (&(&v * &ComplexMatrix::from_real_diagonal(&lambdas)) * &v.adjoint()).hermitian_part();
    OrthogonalizingScenario {
        state: PureState::normalized(amps).expect("nonzero amplitudes"),
        generator,
        designed_theta: std::f64::consts::PI * hbar / (m as f64 * omega),
    }
}

/// Mixed state built from equal superpositions of eigenvector pairs whose gaps
/// are odd multiples of `ω`; every component flips by `θ = πħ/ω`.
#[derive(Clone, Debug)]
pub struct OrthogonalizingMixedScenario {
    pub state: DensityMatrix,
    pub generator: ComplexMatrix,
    pub designed_theta: f64,
}

pub fn orthogonalizing_mixed_scenario<R: Rng + ?Sized>(
    dim: usize,
    hbar: f64,
    rng: &mut R,
) -> OrthogonalizingMixedScenario {
    assert!(dim >= 4, "a mixed orthogonalizing state needs two level pairs");
    let omega = rng.random_range(0.5..2.0);
    let offset = rng.random_range(-1.0..1.0);
    // pair levels (2r, 2r+1) with gap an odd multiple of ω, interleaved so gaps stay distinct
    let pairs = dim / 2;
    let mut lambdas = vec![0.0; dim];
    for r in 0..pairs {
        let base = offset + omega * rng.random_range(0..4) as f64 + 0.37 * omega * r as f64;
        let odd = (2 * rng.random_range(0..3) + 1) as f64;
        lambdas[2 * r] = base;
        lambdas[2 * r + 1] = base + odd * omega;
    }
    if dim % 2 == 1 {
        lambdas[dim - 1] = offset - omega;
    }
    let v = random_unitary(dim, rng);
    let weights: Vec<f64> = (0..pairs).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut rho = ComplexMatrix::zeros(dim);
    for (r, w) in weights.iter().enumerate() {
        let phase = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
        let psi: Vec<C64> = (0..dim)
            .map(|row| (v.get(row, 2 * r) + v.get(row, 2 * r + 1) * phase) * std::f64::consts::FRAC_1_SQRT_2)
            .collect();
        rho = &rho + &ComplexMatrix::outer(&psi, &psi).scale_real(w / total);
    }
    let generator = (&(&v * &ComplexMatrix::from_real_diagonal(&lambdas)) * &v.adjoint()).hermitian_part();
    OrthogonalizingMixedScenario {
        state: DensityMatrix::from_matrix_unchecked(rho.hermitian_part()),
        generator,
        designed_theta: std::f64::consts::PI * hbar / omega,
    }
}
