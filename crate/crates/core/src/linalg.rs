//! Dense complex matrix kernel.
//!
//! [`ComplexMatrix`] is a thin square-matrix newtype over `nalgebra::DMatrix`.
//! Everything the physics modules need sits here: Hermitian eigendecomposition,
//! unitary exponentials, PSD square roots, commutators and Kronecker products.
//!
//! Multi-qubit operators built with [`ComplexMatrix::kron`] put the left factor
//! on the most significant index bits, so qubit 0 is the leftmost factor.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative Frobenius tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as zero.
pub const PSD_CLAMP: f64 = 1e-12;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Square complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    /// Wraps an nalgebra matrix after checking shape and finiteness.
    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        if m.nrows() == 0 {
            return Err(Error::Empty);
        }
        for col in 0..m.ncols() {
            for row in 0..m.nrows() {
                let z = m[(row, col)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row, col });
                }
            }
        }
        Ok(Self(m))
    }

    /// Builds a `dim x dim` matrix from row-major entries.
    pub fn from_row_slice(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimMismatch { expected: dim * dim, found: entries.len() });
        }
        Self::from_dmatrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::NotSquare { rows: dim, cols: row.len() });
            }
            entries.extend(row.iter().map(|&x| c64(x, 0.0)));
        }
        Self::from_row_slice(dim, &entries)
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |i, j| if i == j { c64(diag[i], 0.0) } else { C64::ZERO })
    }

    /// `|v><w|`
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        assert_eq!(v.len(), w.len(), "outer product of unequal lengths");
        Self::from_fn(v.len(), |i, j| v[i] * w[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self(&self.0 * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(c64(factor, 0.0))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 + &other.0 * &self.0)
    }

    /// Tensor product `self ⊗ other`; `self` occupies the high-order index bits.
    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// `‖M − M†‖_F / max(1, ‖M‖_F)`
    pub fn hermitian_residual(&self) -> f64 {
        let diff = (&self.0 - self.0.adjoint()).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        diff / self.frobenius_norm().max(1.0)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_residual() <= HERMITIAN_TOL
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let residual = self.hermitian_residual();
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual });
        }
        Ok(())
    }

    /// `(M + M†) / 2`
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * c64(0.5, 0.0))
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim(), "vector length does not match matrix dimension");
        let out = &self.0 * DVector::from_column_slice(v);
        out.iter().copied().collect()
    }

    /// `<v|M|v>`
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let mv = self.apply(v);
        v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        let n = self.dim();
        let mut acc = C64::ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.0[(i, k)] * other.0[(k, i)];
            }
        }
        acc
    }

    pub fn column(&self, col: usize) -> Vec<C64> {
        self.0.column(col).iter().copied().collect()
    }

    /// `A† M A`
    pub fn conjugate_by(&self, a: &Self) -> Self {
        Self(a.0.adjoint() * &self.0 * &a.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V f(Λ) V†`
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let v = self.eigenvectors.as_dmatrix();
        let mut scaled = v.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let fj = f(lambda);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= fj);
        }
        ComplexMatrix(scaled * v.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_eigenvalues(|l| c64(l, 0.0))
    }

    /// Re-expresses `m` in the eigenbasis: `V† M V`.
    pub fn to_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        m.conjugate_by(&self.eigenvectors)
    }

    /// Maps an eigenbasis matrix back: `V M V†`.
    pub fn from_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let v = self.eigenvectors.as_dmatrix();
        ComplexMatrix(v * m.as_dmatrix() * v.adjoint())
    }

    /// Components of `psi` in the eigenbasis: `V† ψ`.
    pub fn coefficients(&self, psi: &[C64]) -> Vec<C64> {
        self.eigenvectors.adjoint().apply(psi)
    }

    /// Inverse of [`coefficients`](Self::coefficients).
    pub fn synthesize(&self, coeffs: &[C64]) -> Vec<C64> {
        self.eigenvectors.apply(coeffs)
    }
}

/// Hermitian eigendecomposition.
pub fn eigh(m: &ComplexMatrix) -> Result<SpectralDecomposition> {
    m.ensure_hermitian()?;
    let sym = m.hermitian_part().into_dmatrix();
    let dim = sym.nrows();
    if dim == 1 {
        return Ok(SpectralDecomposition {
            eigenvalues: vec![sym[(0, 0)].re],
            eigenvectors: ComplexMatrix::identity(1),
        });
    }
    let eig = sym.try_symmetric_eigen(EIGEN_EPS, EIGEN_MAX_ITER).ok_or(Error::ConvergenceFailure)?;

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    if eigenvalues.iter().any(|l| !l.is_finite()) {
        return Err(Error::ConvergenceFailure);
    }
    let eigenvectors = DMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(SpectralDecomposition { eigenvalues, eigenvectors: ComplexMatrix(eigenvectors) })
}

/// `exp(−i·K·angle/ħ)` for Hermitian `K`.
pub fn expm_unitary(k: &ComplexMatrix, angle: f64, hbar: f64) -> Result<ComplexMatrix> {
    let spectral = eigh(k)?;
    Ok(unitary_from_spectrum(&spectral, angle, hbar))
}

/// Same as [`expm_unitary`] but reuses an existing decomposition.
pub fn unitary_from_spectrum(spectral: &SpectralDecomposition, angle: f64, hbar: f64) -> ComplexMatrix {
    spectral.map_eigenvalues(|l| C64::from_polar(1.0, -l * angle / hbar))
}

/// Principal square root of a Hermitian PSD matrix.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spectral = eigh(m)?;
    psd_sqrt_from_spectrum(&spectral)
}

pub fn psd_sqrt_from_spectrum(spectral: &SpectralDecomposition) -> Result<ComplexMatrix> {
    check_psd(&spectral.eigenvalues)?;
    Ok(spectral.map_eigenvalues(|l| c64(l.max(0.0).sqrt(), 0.0)))
}

pub(crate) fn check_psd(eigenvalues: &[f64]) -> Result<()> {
    match eigenvalues.first() {
        Some(&min) if min < -PSD_CLAMP => Err(Error::NotPsd { min_eigenvalue: min }),
        _ => Ok(()),
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).expect("static matrix")
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, &[C64::ZERO, c64(0.0, -1.0), c64(0.0, 1.0), C64::ZERO]).expect("static matrix")
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
}

pub fn hadamard() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows(&[&[s, s], &[s, -s]]).expect("static matrix")
}

/// `diag(1, e^{iφ})`
pub fn phase_gate(phi: f64) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, &[C64::ONE, C64::ZERO, C64::ZERO, C64::from_polar(1.0, phi)]).expect("static matrix")
}

/// Controlled-Z on two qubits, `diag(1, 1, 1, −1)`.
pub fn controlled_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 1.0, -1.0])
}

/// Euclidean inner product `<a|b>`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    assert_eq!(a.len(), b.len(), "inner product of unequal lengths");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Thin singular value decomposition `M = U Σ V†` of an `n x m` matrix.
#[derive(Clone, Debug)]
pub struct Svd {
    /// Unsorted, one per column of the input.
    pub singular_values: Vec<f64>,
    /// `n x m`; column `k` is zero when `singular_values[k]` is zero.
    pub u: DMatrix<C64>,
    /// `m x m` unitary.
    pub v: DMatrix<C64>,
}

const JACOBI_TOL: f64 = 1e-15;
const JACOBI_MAX_SWEEPS: usize = 100;

/// One-sided (Hestenes) Jacobi SVD.
///
/// Orthogonalises the columns of `M` by complex plane rotations accumulated
/// into `V`. Small singular values keep high relative accuracy, which the
/// bidiagonal QR routine does not guarantee for nearly rank-deficient input.
pub fn svd(m: &DMatrix<C64>) -> Result<Svd> {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut v = DMatrix::<C64>::identity(cols, cols);
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: f64 = a.column(p).iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = a.column(q).iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = a.column(p).iter().zip(a.column(q).iter()).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= JACOBI_TOL * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let e_conj = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut a, &mut v] {
                    for r in 0..mat.nrows() {
                        let (xp, xq) = (mat[(r, p)], mat[(r, q)]);
                        mat[(r, p)] = xp * c - xq * e_conj * s;
                        mat[(r, q)] = xp * s + xq * e_conj * c;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure);
    }
    let mut u = DMatrix::<C64>::zeros(rows, cols);
    let mut singular_values = Vec::with_capacity(cols);
    for k in 0..cols {
        let sigma = a.column(k).norm();
        if sigma > 0.0 {
            u.set_column(k, &(a.column(k) / c64(sigma, 0.0)));
        }
        singular_values.push(sigma);
    }
    Ok(Svd { singular_values, u, v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        (a - b).as_dmatrix().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn identity_spectrum() {
        let s = eigh(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(s.eigenvalues.len(), 2);
        for l in &s.eigenvalues {
            assert!((l - 1.0).abs() < 1e-15);
        }
        let vtv = &s.eigenvectors.adjoint() * &s.eigenvectors;
        assert!(max_abs_diff(&vtv, &ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn pauli_z_spectrum_is_ascending() {
        let s = eigh(&pauli_z()).unwrap();
        assert_eq!(s.eigenvalues, vec![-1.0, 1.0]);
        // eigenvalue −1 belongs to |1>
        assert!((s.eigenvectors.get(1, 0).norm() - 1.0).abs() < 1e-15);
        assert!((s.eigenvectors.get(0, 1).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_hermitian_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in [2usize, 3, 5, 8, 16, 32, 64] {
            let m = sampling::random_hermitian(dim, &mut rng);
            let s = eigh(&m).unwrap();
            let recon = (&s.reconstruct() - &m).frobenius_norm();
            assert!(recon < 1e-10 * dim as f64, "dim {dim}: residual {recon:e}");
            let vtv = &s.eigenvectors.adjoint() * &s.eigenvectors;
            assert!((&vtv - &ComplexMatrix::identity(dim)).frobenius_norm() < 1e-10);
            assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(eigh(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn construction_rejects_bad_input() {
        let nan = ComplexMatrix::from_row_slice(1, &[c64(f64::NAN, 0.0)]);
        assert!(matches!(nan, Err(Error::NonFinite { .. })));
        let short = ComplexMatrix::from_row_slice(2, &[C64::ONE; 3]);
        assert!(matches!(short, Err(Error::DimMismatch { .. })));
        assert!(matches!(ComplexMatrix::from_real_rows(&[]), Err(Error::Empty)));
    }

    #[test]
    fn expm_zero_angle_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let k = sampling::random_hermitian(4, &mut rng);
        let u = expm_unitary(&k, 0.0, 1.0).unwrap();
        assert!(max_abs_diff(&u, &ComplexMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn expm_z_at_pi_is_minus_identity() {
        // e^{-iπ} = e^{iπ} = −1
        let u = expm_unitary(&pauli_z(), PI, 1.0).unwrap();
        assert!(max_abs_diff(&u, &ComplexMatrix::identity(2).scale_real(-1.0)) < 1e-15);
        // ħ enters only through angle/ħ
        let u2 = expm_unitary(&pauli_z(), 2.0 * PI, 2.0).unwrap();
        assert!(max_abs_diff(&u, &u2) < 1e-15);
    }

    #[test]
    fn expm_unitarity_and_group_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dim in 2..=8 {
            let k = sampling::random_hermitian(dim, &mut rng);
            let u = expm_unitary(&k, 0.7, 1.0).unwrap();
            let utu = &u.adjoint() * &u;
            assert!((&utu - &ComplexMatrix::identity(dim)).frobenius_norm() < 1e-10);
            let ua = expm_unitary(&k, 0.3, 1.0).unwrap();
            let ub = expm_unitary(&k, 0.4, 1.0).unwrap();
            assert!((&(&ua * &ub) - &u).frobenius_norm() < 1e-9);
        }
    }

    #[test]
    fn psd_sqrt_examples() {
        let s = psd_sqrt(&ComplexMatrix::identity(3)).unwrap();
        assert!(max_abs_diff(&s, &ComplexMatrix::identity(3)) < 1e-14);
        let d = psd_sqrt(&ComplexMatrix::from_real_diagonal(&[4.0, 9.0])).unwrap();
        assert!(max_abs_diff(&d, &ComplexMatrix::from_real_diagonal(&[2.0, 3.0])) < 1e-14);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in 2..=8 {
            let rho = sampling::random_density_matrix(dim, dim, &mut rng);
            let m = rho.matrix();
            let r = psd_sqrt(m).unwrap();
            assert!(r.is_hermitian());
            assert!((&(&r * &r) - m).frobenius_norm() < 1e-9);
        }
    }

    #[test]
    fn psd_sqrt_clamps_and_rejects() {
        let nearly = ComplexMatrix::from_real_diagonal(&[1.0, -5e-13]);
        let r = psd_sqrt(&nearly).unwrap();
        assert_eq!(r.get(1, 1), C64::ZERO);
        let neg = ComplexMatrix::from_real_diagonal(&[1.0, -1e-6]);
        assert!(matches!(psd_sqrt(&neg), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn commutator_and_anticommutator_of_paulis() {
        let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
        // [X, Y] = 2iZ, {X, Y} = 0
        assert!(max_abs_diff(&x.commutator(&y), &z.scale(c64(0.0, 2.0))) < 1e-15);
        assert!(x.anticommutator(&y).frobenius_norm() < 1e-15);
        assert!(max_abs_diff(&x.anticommutator(&x), &ComplexMatrix::identity(2).scale_real(2.0)) < 1e-15);
    }

    #[test]
    fn kron_orders_first_factor_most_significant() {
        // Z ⊗ I = diag(1, 1, −1, −1)
        let zi = pauli_z().kron(&ComplexMatrix::identity(2));
        assert!(max_abs_diff(&zi, &ComplexMatrix::from_real_diagonal(&[1.0, 1.0, -1.0, -1.0])) < 1e-15);
        let cz = controlled_z();
        assert_eq!(cz.get(3, 3), c64(-1.0, 0.0));
    }

    #[test]
    fn trace_and_norm() {
        let m = ComplexMatrix::from_real_diagonal(&[1.0, 2.0, 3.0]);
        assert_eq!(m.trace(), c64(6.0, 0.0));
        assert!((m.frobenius_norm() - 14f64.sqrt()).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = sampling::random_hermitian(4, &mut rng);
        let b = sampling::random_hermitian(4, &mut rng);
        assert!((a.trace_product(&b) - (&a * &b).trace()).norm() < 1e-12);
    }

    fn svd_reconstruction_error(m: &DMatrix<C64>) -> f64 {
        let d = svd(m).unwrap();
        let sigma = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            d.singular_values.len(),
            d.singular_values.iter().map(|&x| c64(x, 0.0)),
        ));
        (&d.u * sigma * d.v.adjoint() - m).norm()
    }

    #[test]
    fn jacobi_svd_reconstructs_and_orders_nothing() {
        let mut rng = crate::sampling::rng_for(7, 0);
        for dim in [1, 2, 5, 9] {
            let a = crate::sampling::random_unitary(dim, &mut rng).into_dmatrix();
            let h = crate::sampling::random_hermitian(dim, &mut rng).into_dmatrix();
            let m = &a * &h;
            assert!(svd_reconstruction_error(&m) < 1e-12);
            let d = svd(&m).unwrap();
            assert!((d.v.adjoint() * &d.v - DMatrix::identity(dim, dim)).norm() < 1e-12);
            // singular values of A·H are |eigenvalues of H|
            let mut sv = d.singular_values.clone();
            sv.sort_by(f64::total_cmp);
            let mut ev: Vec<f64> = eigh(&ComplexMatrix(h)).unwrap().eigenvalues.iter().map(|x| x.abs()).collect();
            ev.sort_by(f64::total_cmp);
            for (x, y) in sv.iter().zip(&ev) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jacobi_svd_handles_rank_deficient_products() {
        // product of two nearly aligned rank-4 square roots in 8 dimensions
        let mut rng = crate::sampling::rng_for(8, 0);
        let rho = crate::sampling::random_density_matrix(8, 4, &mut rng);
        let root = psd_sqrt(rho.matrix()).unwrap().into_dmatrix();
        let u = expm_unitary(&crate::sampling::random_hermitian(8, &mut rng), 1e-4, 1.0).unwrap().into_dmatrix();
        let m = root.adjoint() * (&u * &root * u.adjoint());
        assert!(svd_reconstruction_error(&m) < 1e-14);
        let nuclear: f64 = svd(&m).unwrap().singular_values.iter().sum();
        assert!(nuclear <= 1.0 + 1e-12);
    }

    #[test]
    fn jacobi_svd_of_rectangular_matrix() {
        let m = DMatrix::from_fn(5, 2, |r, c| c64(r as f64 + 1.0, c as f64 - 0.5 * r as f64));
        assert!(svd_reconstruction_error(&m) < 1e-13);
    }
}
