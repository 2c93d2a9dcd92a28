//! Pauli strings and real-linear (in general complex) combinations of them.
//!
//! A [`PauliWord`] stores one letter per qubit as a pair of bitmasks with the
//! Hermitian convention `Y = iXZ`, so every word is a Hermitian operator and a
//! Hermitian [`PauliSum`] has real coefficients. Bit `q` of each mask belongs
//! to qubit `q`; when a sum is turned into a matrix or applied to a state,
//! qubit 0 is the most significant index bit.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, ComplexMatrix, C64};

/// Coefficients with magnitude at or below this are dropped.
pub const PRUNE_TOL: f64 = 1e-14;
/// Largest register handled by the bitmask representation.
pub const MAX_QUBITS: usize = 64;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// `self · other = i^k · result`
    fn product(self, other: Self) -> (u8, Self) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

fn i_pow(k: u8) -> C64 {
    match k % 4 {
        0 => C64::ONE,
        1 => C64::I,
        2 => -C64::ONE,
        _ => -C64::I,
    }
}

/// Tensor product of single-qubit Pauli letters, as x/z bitmasks.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliWord {
    x: u64,
    z: u64,
}

impl PauliWord {
    pub const IDENTITY: Self = Self { x: 0, z: 0 };

    pub fn from_masks(x: u64, z: u64) -> Self {
        Self { x, z }
    }

    pub fn single(qubit: usize, letter: Pauli) -> Self {
        Self::IDENTITY.with_letter(qubit, letter)
    }

    /// Word from `(qubit, letter)` pairs; later pairs overwrite earlier ones.
    pub fn from_pairs(pairs: &[(usize, Pauli)]) -> Self {
        pairs.iter().fold(Self::IDENTITY, |w, &(q, p)| w.with_letter(q, p))
    }

    pub fn from_letters(letters: &[Pauli]) -> Self {
        letters.iter().enumerate().fold(Self::IDENTITY, |w, (q, &p)| w.with_letter(q, p))
    }

    pub fn x_mask(self) -> u64 {
        self.x
    }

    pub fn z_mask(self) -> u64 {
        self.z
    }

    pub fn letter(self, qubit: usize) -> Pauli {
        Pauli::from_bits(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    pub fn with_letter(self, qubit: usize, letter: Pauli) -> Self {
        assert!(qubit < MAX_QUBITS, "qubit index {qubit} out of range");
        let bit = 1u64 << qubit;
        let (x, z) = letter.bits();
        Self {
            x: if x { self.x | bit } else { self.x & !bit },
            z: if z { self.z | bit } else { self.z & !bit },
        }
    }

    pub fn support(self) -> u64 {
        self.x | self.z
    }

    pub fn weight(self) -> u32 {
        self.support().count_ones()
    }

    pub fn commutes_with(self, other: Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// `self · other = phase · word`
    pub fn mul(self, other: Self) -> (C64, Self) {
        let result = Self { x: self.x ^ other.x, z: self.z ^ other.z };
        let mut k = 0u8;
        let mut overlap = self.support() & other.support();
        while overlap != 0 {
            let q = overlap.trailing_zeros() as usize;
            overlap &= overlap - 1;
            k += self.letter(q).product(other.letter(q)).0;
        }
        (i_pow(k), result)
    }

    /// Letters for qubits `0..n`, qubit 0 first.
    pub fn letters(self, n: usize) -> Vec<Pauli> {
        (0..n).map(|q| self.letter(q)).collect()
    }

    pub fn label(self, n: usize) -> String {
        self.letters(n).into_iter().map(Pauli::symbol).collect()
    }
}

/// A single Pauli string with a real coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliString {
    pub letters: Vec<Pauli>,
    pub coeff: f64,
}

impl PauliString {
    pub fn word(&self) -> PauliWord {
        PauliWord::from_letters(&self.letters)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label: String = self.letters.iter().map(|p| p.symbol()).collect();
        write!(f, "{:+.6} {}", self.coeff, label)
    }
}

/// Canonical linear combination of Pauli words on a fixed register.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliWord, C64>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        Self { n_qubits, terms: BTreeMap::new() }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::term(n_qubits, PauliWord::IDENTITY, C64::ONE)
    }

    pub fn term(n_qubits: usize, word: PauliWord, coeff: C64) -> Self {
        let mut s = Self::zero(n_qubits);
        s.add_term(word, coeff);
        s
    }

    pub fn word(n_qubits: usize, word: PauliWord) -> Self {
        Self::term(n_qubits, word, C64::ONE)
    }

    /// Real combination `Σ c_i P_i`.
    pub fn from_real(n_qubits: usize, terms: &[(PauliWord, f64)]) -> Self {
        let mut s = Self::zero(n_qubits);
        for &(w, c) in terms {
            s.add_term(w, c64(c, 0.0));
        }
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, word: PauliWord, coeff: C64) {
        debug_assert!(word.support() >> self.n_qubits == 0 || self.n_qubits == MAX_QUBITS);
        let entry = self.terms.entry(word).or_insert(C64::ZERO);
        *entry += coeff;
        if entry.norm() <= PRUNE_TOL {
            self.terms.remove(&word);
        }
    }

    pub fn coeff(&self, word: PauliWord) -> C64 {
        self.terms.get(&word).copied().unwrap_or(C64::ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (PauliWord, C64)> + '_ {
        self.terms.iter().map(|(w, c)| (*w, *c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-C64::ONE))
    }

    pub fn scale(&self, factor: C64) -> Self {
        let mut out = Self::zero(self.n_qubits);
        for (w, c) in self.terms() {
            out.add_term(w, c * factor);
        }
        out
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n_qubits.max(other.n_qubits));
        for (wa, ca) in self.terms() {
            for (wb, cb) in other.terms() {
                let (phase, w) = wa.mul(wb);
                out.add_term(w, ca * cb * phase);
            }
        }
        out
    }

    /// `[self, other]`, accumulating only anticommuting pairs.
    pub fn commutator(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n_qubits.max(other.n_qubits));
        for (wa, ca) in self.terms() {
            for (wb, cb) in other.terms() {
                if wa.commutes_with(wb) {
                    continue;
                }
                let (phase, w) = wa.mul(wb);
                out.add_term(w, ca * cb * phase * 2.0);
            }
        }
        out
    }

    /// Largest coefficient magnitude; 0 for the zero operator.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `Σ |c_i|²`, equal to `Tr(P†P)/2^n`.
    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum()
    }

    /// Coefficient-space distance `√Σ |a_i − b_i|²`.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        for (w, c) in self.terms() {
            acc += (c - other.coeff(w)).norm_sqr();
        }
        for (w, c) in other.terms() {
            if !self.terms.contains_key(&w) {
                acc += c.norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn max_imag(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_imag() <= tol
    }

    /// Real-coefficient strings; fails if any coefficient has an imaginary part above `tol`.
    pub fn to_strings(&self, tol: f64) -> Result<Vec<PauliString>> {
        if !self.is_hermitian(tol) {
            return Err(Error::InvalidParameter(format!(
                "Pauli sum is not Hermitian (imaginary part {:e})",
                self.max_imag()
            )));
        }
        Ok(self.terms().map(|(w, c)| PauliString { letters: w.letters(self.n_qubits), coeff: c.re }).collect())
    }

    /// Multiplies each word by `factor` on the right: `Σ c_i P_i · factor`.
    fn right_mul_word(&self, factor: PauliWord) -> Self {
        let mut out = Self::zero(self.n_qubits);
        for (w, c) in self.terms() {
            let (phase, prod) = w.mul(factor);
            out.add_term(prod, c * phase);
        }
        out
    }

    /// Applies the operator to a statevector over `n_qubits` qubits.
    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let n = self.n_qubits;
        assert_eq!(psi.len(), 1usize << n, "statevector length must be 2^n");
        let mut out = vec![C64::ZERO; psi.len()];
        for (w, c) in self.terms() {
            let (xi, zi) = index_masks(w, n);
            let base = c * i_pow(((w.x & w.z).count_ones() % 4) as u8);
            for (b, amp) in psi.iter().enumerate() {
                let sign = if (zi & b as u64).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                out[b ^ xi as usize] += base * amp * sign;
            }
        }
        out
    }

    /// Dense matrix on `2^n` dimensions, for small registers.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let dim = 1usize << self.n_qubits;
        let mut m = ComplexMatrix::zeros(dim).into_dmatrix();
        for (w, c) in self.terms() {
            let (xi, zi) = index_masks(w, self.n_qubits);
            let base = c * i_pow(((w.x & w.z).count_ones() % 4) as u8);
            for b in 0..dim {
                let sign = if (zi & b as u64).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                m[(b ^ xi as usize, b)] += base * sign;
            }
        }
        ComplexMatrix::from_dmatrix(m).expect("finite Pauli matrix")
    }

    /// `U S U†` under a gate.
    pub fn conjugate(&self, gate: Gate) -> Self {
        let touched = gate.qubits();
        let mut out = Self::zero(self.n_qubits);
        for (w, c) in self.terms() {
            let mut rest = w;
            for &q in &touched {
                rest = rest.with_letter(q, Pauli::I);
            }
            let mut acc = Self::term(self.n_qubits, rest, c);
            for &q in &touched {
                let letter = w.letter(q);
                if letter != Pauli::I {
                    acc = acc.mul(&gate.image(q, letter, self.n_qubits));
                }
            }
            out = out.add(&acc);
        }
        out
    }

    pub fn conjugate_all(&self, gates: &[Gate]) -> Self {
        gates.iter().fold(self.clone(), |s, &g| s.conjugate(g))
    }

    /// Heisenberg picture `U† S U` with `U = e^{−iHt/ħ}` and `H` diagonal.
    ///
    /// For a word `P` with X-part `a`, `U† P U = P · Π_S (cos(2c_S t/ħ) − i sin(2c_S t/ħ) Z_S)`
    /// over the Hamiltonian terms `c_S Z_S` whose support overlaps `a` an odd number of times.
    pub fn heisenberg(&self, ham: &DiagonalHamiltonian, t: f64, hbar: f64) -> Self {
        let mut out = Self::zero(self.n_qubits);
        for (w, c) in self.terms() {
            let mut phases: BTreeMap<u64, C64> = BTreeMap::from([(0u64, C64::ONE)]);
            for (&mask, &coeff) in &ham.terms {
                if (mask & w.x).count_ones() % 2 == 0 {
                    continue;
                }
                let angle = 2.0 * coeff * t / hbar;
                let (cos, sin) = (angle.cos(), angle.sin());
                let mut next = BTreeMap::new();
                for (&z, &a) in &phases {
                    *next.entry(z).or_insert(C64::ZERO) += a * cos;
                    *next.entry(z ^ mask).or_insert(C64::ZERO) += a * c64(0.0, -sin);
                }
                phases = next;
            }
            for (z, a) in phases {
                let (phase, word) = w.mul(PauliWord::from_masks(0, z));
                out.add_term(word, c * a * phase);
            }
        }
        out
    }

    /// Reduces the sum on the joint +1 eigenspace of single-letter stabilizers:
    /// a term carrying letter `P` on qubit `q`, where `P_q` stabilizes the state, is
    /// replaced by its product with `P_q`.
    pub fn reduce_by_single_qubit_stabilizers(&self, stabilizers: &[(usize, Pauli)]) -> Self {
        let mut out = Self::zero(self.n_qubits);
        for (w, c) in self.terms() {
            let mut term = Self::term(self.n_qubits, w, c);
            for &(q, p) in stabilizers {
                if w.letter(q) == p {
                    term = term.right_mul_word(PauliWord::single(q, p));
                }
            }
            out = out.add(&term);
        }
        out
    }
}

/// Index-space masks with qubit 0 as the most significant bit.
fn index_masks(w: PauliWord, n: usize) -> (u64, u64) {
    let mut xi = 0u64;
    let mut zi = 0u64;
    for q in 0..n {
        let bit = 1u64 << (n - 1 - q);
        if w.x >> q & 1 == 1 {
            xi |= bit;
        }
        if w.z >> q & 1 == 1 {
            zi |= bit;
        }
    }
    (xi, zi)
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(w, c)| {
                if c.im.abs() <= 1e-12 {
                    format!("{:+.6} {}", c.re, w.label(self.n_qubits))
                } else {
                    format!("({:+.6}{:+.6}i) {}", c.re, c.im, w.label(self.n_qubits))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Gates whose conjugation action on Pauli letters is tabulated.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Gate {
    Hadamard(usize),
    /// `diag(1, e^{iφ})`
    Phase(usize, f64),
    Cz(usize, usize),
}

impl Gate {
    fn qubits(self) -> Vec<usize> {
        match self {
            Gate::Hadamard(q) | Gate::Phase(q, _) => vec![q],
            Gate::Cz(a, b) => vec![a, b],
        }
    }

    /// `U P_q U†` for a single non-identity letter.
    fn image(self, q: usize, letter: Pauli, n: usize) -> PauliSum {
        let w = |pairs: &[(usize, Pauli)]| PauliWord::from_pairs(pairs);
        match (self, letter) {
            (_, Pauli::I) => PauliSum::identity(n),
            (Gate::Hadamard(_), Pauli::X) => PauliSum::word(n, w(&[(q, Pauli::Z)])),
            (Gate::Hadamard(_), Pauli::Z) => PauliSum::word(n, w(&[(q, Pauli::X)])),
            (Gate::Hadamard(_), Pauli::Y) => PauliSum::term(n, w(&[(q, Pauli::Y)]), -C64::ONE),
            (Gate::Phase(_, phi), Pauli::X) => {
                PauliSum::from_real(n, &[(w(&[(q, Pauli::X)]), phi.cos()), (w(&[(q, Pauli::Y)]), phi.sin())])
            }
            (Gate::Phase(_, phi), Pauli::Y) => {
                PauliSum::from_real(n, &[(w(&[(q, Pauli::Y)]), phi.cos()), (w(&[(q, Pauli::X)]), -phi.sin())])
            }
            (Gate::Phase(_, _), Pauli::Z) => PauliSum::word(n, w(&[(q, Pauli::Z)])),
            (Gate::Cz(a, b), p) => {
                let other = if q == a { b } else { a };
                match p {
                    Pauli::Z => PauliSum::word(n, w(&[(q, Pauli::Z)])),
                    _ => PauliSum::word(n, w(&[(q, p), (other, Pauli::Z)])),
                }
            }
        }
    }

    /// The gate as a dense unitary on its own qubits (1 or 2).
    pub fn local_matrix(self) -> ComplexMatrix {
        match self {
            Gate::Hadamard(_) => crate::linalg::hadamard(),
            Gate::Phase(_, phi) => crate::linalg::phase_gate(phi),
            Gate::Cz(_, _) => crate::linalg::controlled_z(),
        }
    }
}

/// Hamiltonian diagonal in the computational basis: `c_0 𝕀 + Σ_S c_S Z_S`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalHamiltonian {
    n_qubits: usize,
    constant: f64,
    /// Z-support mask → coefficient, merged and without the identity.
    terms: BTreeMap<u64, f64>,
}

impl DiagonalHamiltonian {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, constant: 0.0, terms: BTreeMap::new() }
    }

    pub fn add_z_term(&mut self, qubits: &[usize], coeff: f64) {
        let mask = qubits.iter().fold(0u64, |m, &q| m ^ (1u64 << q));
        if mask == 0 {
            self.constant += coeff;
            return;
        }
        let entry = self.terms.entry(mask).or_insert(0.0);
        *entry += coeff;
        if entry.abs() <= PRUNE_TOL {
            self.terms.remove(&mask);
        }
    }

    /// `Σ_j g(𝕀₀ − Z₀)(𝕀_j − Z_j)` for central qubit 0 and satellites `1..=n_satellites`.
    pub fn cz_interaction(n_satellites: usize, g: f64) -> Self {
        let mut h = Self::new(n_satellites + 1);
        for j in 1..=n_satellites {
            h.add_z_term(&[], g);
            h.add_z_term(&[0], -g);
            h.add_z_term(&[j], -g);
            h.add_z_term(&[0, j], g);
        }
        h
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn to_pauli_sum(&self) -> PauliSum {
        let mut s = PauliSum::zero(self.n_qubits);
        s.add_term(PauliWord::IDENTITY, c64(self.constant, 0.0));
        for (&mask, &c) in &self.terms {
            s.add_term(PauliWord::from_masks(0, mask), c64(c, 0.0));
        }
        s
    }
}
