//! Dense complex linear algebra over 2^N-dimensional qubit registers:
//! states, density matrices, multi-qubit operators, Pauli strings and
//! Kraus channels.
//!
//! Basis convention used everywhere in this crate: qubit 1 is the most
//! significant bit of the computational-basis index, so `|0011⟩` on four
//! qubits is basis index 3. All values are immutable after construction
//! and safe to share across threads.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register size supported by the dense representation.
pub const MAX_QUBITS: usize = 8;

/// Tolerance for Hermiticity checks on states and observables.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Tolerance for norm and trace checks.
pub const NORM_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue of a density matrix.
pub const POSITIVITY_TOL: f64 = 1e-10;
/// Tolerance for Kraus completeness and unitarity checks.
pub const CHANNEL_TOL: f64 = 1e-10;
/// Largest imaginary residue tolerated when an expectation value is taken real.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

pub(crate) const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const C_ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const C_I: Complex64 = Complex64::new(0.0, 1.0);

fn check_qubit_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::UnsupportedQubitCount(n));
    }
    Ok(())
}

fn check_same_qubits(a: usize, b: usize, context: &str) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(format!(
            "{context}: {a} qubits vs {b} qubits"
        )));
    }
    Ok(())
}

fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
            if dev > worst {
                worst = dev;
            }
        }
    }
    worst
}

/// Smallest eigenvalue of a Hermitian matrix.
fn min_eigenvalue_hermitian(m: &DMatrix<Complex64>) -> f64 {
    let eig = SymmetricEigen::new(m.clone());
    eig.eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Neumaier-compensated sum; returns the correctly rounded exact sum of the
/// inputs, so cancellations that hold mathematically survive in floating
/// point (e.g. traceless Pauli sums).
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut compensation = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}

fn compensated_trace(m: &DMatrix<Complex64>) -> Complex64 {
    let re = compensated_sum(m.diagonal().iter().map(|e| e.re));
    let im = compensated_sum(m.diagonal().iter().map(|e| e.im));
    Complex64::new(re, im)
}

// ---------------------------------------------------------------------------
// Pauli operators and Pauli strings
// ---------------------------------------------------------------------------

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> DMatrix<Complex64> {
        let e = match self {
            Pauli::I => [C_ONE, C_ZERO, C_ZERO, C_ONE],
            Pauli::X => [C_ZERO, C_ONE, C_ONE, C_ZERO],
            Pauli::Y => [C_ZERO, -C_I, C_I, C_ZERO],
            Pauli::Z => [C_ONE, C_ZERO, C_ZERO, -C_ONE],
        };
        DMatrix::from_row_slice(2, 2, &e)
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// The four unit phases a Pauli string can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliPhase {
    Plus,
    Minus,
    PlusI,
    MinusI,
}

impl PauliPhase {
    pub fn to_complex(self) -> Complex64 {
        match self {
            PauliPhase::Plus => C_ONE,
            PauliPhase::Minus => -C_ONE,
            PauliPhase::PlusI => C_I,
            PauliPhase::MinusI => -C_I,
        }
    }

    /// Snaps a complex number to the nearest of the four unit phases.
    /// Fails when the number is further than `tol` from every candidate.
    pub fn from_complex(c: Complex64, tol: f64) -> Result<Self> {
        let candidates = [
            PauliPhase::Plus,
            PauliPhase::Minus,
            PauliPhase::PlusI,
            PauliPhase::MinusI,
        ];
        for p in candidates {
            if (c - p.to_complex()).norm() <= tol {
                return Ok(p);
            }
        }
        Err(Error::PauliParse(format!("{c} is not a unit Pauli phase")))
    }

    pub fn is_real(self) -> bool {
        matches!(self, PauliPhase::Plus | PauliPhase::Minus)
    }
}

impl std::fmt::Display for PauliPhase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PauliPhase::Plus => Ok(()),
            PauliPhase::Minus => write!(f, "-"),
            PauliPhase::PlusI => write!(f, "i"),
            PauliPhase::MinusI => write!(f, "-i"),
        }
    }
}

/// A phased tensor product of single-qubit Pauli operators, e.g. `-YYII`.
///
/// Label order follows the qubit order: the first label acts on qubit 1
/// (the most significant bit of the basis index).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    labels: Vec<Pauli>,
    phase: PauliPhase,
}

impl PauliString {
    pub fn new(labels: Vec<Pauli>, phase: PauliPhase) -> Result<Self> {
        check_qubit_count(labels.len())?;
        Ok(Self { labels, phase })
    }

    /// Parses strings like `ZIII`, `-YYII`, `iXZ`, `-iZZ`.
    pub fn parse(s: &str) -> Result<Self> {
        let err = || Error::PauliParse(s.to_string());
        let body = s
            .strip_prefix("-i")
            .map(|b| (PauliPhase::MinusI, b))
            .or_else(|| s.strip_prefix("i").map(|b| (PauliPhase::PlusI, b)))
            .or_else(|| s.strip_prefix("-").map(|b| (PauliPhase::Minus, b)))
            .or_else(|| s.strip_prefix("+").map(|b| (PauliPhase::Plus, b)))
            .unwrap_or((PauliPhase::Plus, s));
        let (phase, body) = body;
        let labels = body
            .chars()
            .map(Pauli::from_char)
            .collect::<Option<Vec<_>>>()
            .ok_or_else(err)?;
        Self::new(labels, phase).map_err(|_| err())
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::new(vec![Pauli::I; n_qubits], PauliPhase::Plus)
    }

    /// A single Pauli on `qubit` (1-based), identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, p: Pauli) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        if qubit == 0 || qubit > n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "qubit index {qubit} outside 1..={n_qubits}"
            )));
        }
        let mut labels = vec![Pauli::I; n_qubits];
        labels[qubit - 1] = p;
        Self::new(labels, PauliPhase::Plus)
    }

    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Pauli] {
        &self.labels
    }

    pub fn phase(&self) -> PauliPhase {
        self.phase
    }

    /// Expands the string into a dense operator: phase times the Kronecker
    /// product of the single-qubit matrices in label order. The result is
    /// Hermitian exactly when the phase is real.
    pub fn to_operator(&self) -> Operator {
        let mut m = DMatrix::from_element(1, 1, self.phase.to_complex());
        for l in &self.labels {
            m = m.kronecker(&l.matrix());
        }
        Operator::new(self.labels.len(), m).expect("Pauli expansion has valid dimensions")
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.phase)?;
        for l in &self.labels {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// StateVector
// ---------------------------------------------------------------------------

/// Normalized pure state of an `n_qubits` register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    pub fn new(n_qubits: usize, amplitudes: DVector<Complex64>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "state of {n_qubits} qubits needs {dim} amplitudes, got {}",
                amplitudes.len()
            )));
        }
        let deviation = (amplitudes.norm_squared() - 1.0).abs();
        if deviation > NORM_TOL {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::new(n_qubits, DVector::from_vec(amplitudes))
    }

    /// Computational basis state `|index⟩`.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch(format!(
                "basis index {index} outside 0..{dim}"
            )));
        }
        let mut amplitudes = DVector::from_element(dim, C_ZERO);
        amplitudes[index] = C_ONE;
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_same_qubits(self.n_qubits, other.n_qubits, "inner product")?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn to_density(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: m,
        }
    }

    /// `⟨ψ|obs|ψ⟩` for a Hermitian observable. The imaginary residue is
    /// checked against [`IMAG_RESIDUE_TOL`] and discarded.
    pub fn expectation(&self, obs: &Operator) -> Result<f64> {
        check_same_qubits(self.n_qubits, obs.n_qubits, "expectation")?;
        if !obs.hermitian {
            return Err(Error::NonHermitianObservable);
        }
        let v = &obs.matrix * &self.amplitudes;
        let e = self.amplitudes.dotc(&v);
        take_real(e)
    }

    /// Largest componentwise amplitude difference against `other`.
    pub fn max_amplitude_distance(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn take_real(e: Complex64) -> Result<f64> {
    if e.im.abs() > IMAG_RESIDUE_TOL {
        return Err(Error::ImaginaryResidue {
            residue: e.im.abs(),
        });
    }
    Ok(e.re)
}

// ---------------------------------------------------------------------------
// DensityMatrix
// ---------------------------------------------------------------------------

/// Hermitian, unit-trace density matrix of an `n_qubits` register.
///
/// Hermiticity and trace are validated on construction; the O(d³)
/// positive-semidefiniteness check is separate ([`DensityMatrix::check_positive`])
/// so that parameter sweeps can skip it.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(n_qubits: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "density matrix of {n_qubits} qubits must be {dim}x{dim}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm = hermiticity_defect(&matrix);
        if herm > HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation: herm });
        }
        let tr = compensated_trace(&matrix);
        let trace_dev = (tr - C_ONE).norm();
        if trace_dev > NORM_TOL {
            return Err(Error::TraceNotOne {
                deviation: trace_dev,
            });
        }
        // Store the exactly Hermitian part; the defect is below tolerance.
        let matrix = (&matrix + matrix.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(Self { n_qubits, matrix })
    }

    pub fn pure(psi: &StateVector) -> Self {
        psi.to_density()
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        let w = Complex64::new(1.0 / dim as f64, 0.0);
        Ok(Self {
            n_qubits,
            matrix: DMatrix::from_diagonal_element(dim, dim, w),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        compensated_trace(&self.matrix)
    }

    /// `Tr(ρ·obs)` for a Hermitian observable.
    pub fn expectation(&self, obs: &Operator) -> Result<f64> {
        check_same_qubits(self.n_qubits, obs.n_qubits, "expectation")?;
        if !obs.hermitian {
            return Err(Error::NonHermitianObservable);
        }
        let mut e = C_ZERO;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                e += self.matrix[(i, j)] * obs.matrix[(j, i)];
            }
        }
        take_real(e)
    }

    /// Verifies the smallest eigenvalue is above `-`[`POSITIVITY_TOL`];
    /// returns it on success.
    pub fn check_positive(&self) -> Result<f64> {
        let min = min_eigenvalue_hermitian(&self.matrix);
        if min < -POSITIVITY_TOL {
            return Err(Error::NotPositive { eigenvalue: min });
        }
        Ok(min)
    }

    pub fn max_entry_distance(&self, other: &DensityMatrix) -> f64 {
        max_matrix_distance(&self.matrix, &other.matrix)
    }
}

pub(crate) fn max_matrix_distance(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Operator
// ---------------------------------------------------------------------------

/// Dense operator on an `n_qubits` register. Hermiticity is detected at
/// construction (max entry deviation from the adjoint at most
/// [`HERMITICITY_TOL`]) and gates the expectation-value paths.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    n_qubits: usize,
    matrix: DMatrix<Complex64>,
    hermitian: bool,
}

impl Operator {
    pub fn new(n_qubits: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "operator on {n_qubits} qubits must be {dim}x{dim}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let hermitian = hermiticity_defect(&matrix) <= HERMITICITY_TOL;
        Ok(Self {
            n_qubits,
            matrix,
            hermitian,
        })
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        Self::new(n_qubits, DMatrix::identity(dim, dim))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Compensated-summation trace, so exactly traceless parts (Pauli
    /// strings) cancel to the correctly rounded result.
    pub fn trace(&self) -> Complex64 {
        compensated_trace(&self.matrix)
    }

    pub fn adjoint(&self) -> Operator {
        Operator::new(self.n_qubits, self.matrix.adjoint()).expect("adjoint preserves dimensions")
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &Operator) -> Result<Operator> {
        check_same_qubits(self.n_qubits, rhs.n_qubits, "operator product")?;
        Operator::new(self.n_qubits, &self.matrix * &rhs.matrix)
    }

    pub fn scaled(&self, factor: Complex64) -> Operator {
        Operator::new(self.n_qubits, &self.matrix * factor).expect("scaling preserves dimensions")
    }

    pub fn add(&self, rhs: &Operator) -> Result<Operator> {
        check_same_qubits(self.n_qubits, rhs.n_qubits, "operator sum")?;
        Operator::new(self.n_qubits, &self.matrix + &rhs.matrix)
    }

    pub fn sub(&self, rhs: &Operator) -> Result<Operator> {
        check_same_qubits(self.n_qubits, rhs.n_qubits, "operator difference")?;
        Operator::new(self.n_qubits, &self.matrix - &rhs.matrix)
    }

    /// Applies the operator to a pure state. The result must again be
    /// normalized, which holds for the unitaries this crate constructs.
    pub fn apply_to(&self, psi: &StateVector) -> Result<StateVector> {
        check_same_qubits(self.n_qubits, psi.n_qubits, "operator application")?;
        StateVector::new(self.n_qubits, &self.matrix * psi.amplitudes())
    }

    /// Max entry deviation of `U·U†` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let dim = self.dim();
        let prod = &self.matrix * self.matrix.adjoint();
        max_matrix_distance(&prod, &DMatrix::identity(dim, dim))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Smallest eigenvalue; requires a Hermitian operator.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        if !self.hermitian {
            return Err(Error::NonHermitianObservable);
        }
        Ok(min_eigenvalue_hermitian(&self.matrix))
    }

    pub fn max_entry_distance(&self, other: &Operator) -> f64 {
        max_matrix_distance(&self.matrix, &other.matrix)
    }
}

// ---------------------------------------------------------------------------
// KrausChannel
// ---------------------------------------------------------------------------

/// Completely positive trace-preserving map in Kraus form,
/// `ρ → Σ_m K_m ρ K_m†` with `Σ_m K_m† K_m = 𝟙`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    n_qubits: usize,
    kraus_ops: Vec<Operator>,
}

impl KrausChannel {
    /// Validates dimensions and completeness (within [`CHANNEL_TOL`]).
    pub fn new(n_qubits: usize, kraus_ops: Vec<Operator>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut sum = DMatrix::from_element(dim, dim, C_ZERO);
        for k in &kraus_ops {
            check_same_qubits(n_qubits, k.n_qubits(), "Kraus operator")?;
            sum += k.matrix().adjoint() * k.matrix();
        }
        let deviation = max_matrix_distance(&sum, &DMatrix::identity(dim, dim));
        if deviation > CHANNEL_TOL {
            return Err(Error::IncompleteKrausSet { deviation });
        }
        Ok(Self {
            n_qubits,
            kraus_ops,
        })
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, vec![Operator::identity(n_qubits)?])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn kraus_ops(&self) -> &[Operator] {
        &self.kraus_ops
    }

    /// Max entry deviation of `Σ K†K` from the identity.
    pub fn completeness_defect(&self) -> f64 {
        let dim = 1usize << self.n_qubits;
        let mut sum = DMatrix::from_element(dim, dim, C_ZERO);
        for k in &self.kraus_ops {
            sum += k.matrix().adjoint() * k.matrix();
        }
        max_matrix_distance(&sum, &DMatrix::identity(dim, dim))
    }

    /// `ρ → Σ_m K_m ρ K_m†`. The output is re-symmetrized so its
    /// Hermiticity is exact up to floating-point pairing.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        check_same_qubits(self.n_qubits, rho.n_qubits(), "channel application")?;
        let dim = rho.dim();
        let mut out = DMatrix::from_element(dim, dim, C_ZERO);
        for k in &self.kraus_ops {
            out += k.matrix() * rho.matrix() * k.matrix().adjoint();
        }
        DensityMatrix::new(self.n_qubits, out)
    }

    /// The conjugated channel with Kraus set `{U K_m U†}`; expresses the
    /// same physical map in a different frame.
    pub fn conjugated(&self, u: &Operator) -> Result<KrausChannel> {
        check_same_qubits(self.n_qubits, u.n_qubits(), "channel conjugation")?;
        let u_dag = u.matrix().adjoint();
        let ops = self
            .kraus_ops
            .iter()
            .map(|k| Operator::new(self.n_qubits, u.matrix() * k.matrix() * &u_dag))
            .collect::<Result<Vec<_>>>()?;
        KrausChannel::new(self.n_qubits, ops)
    }

    /// Choi matrix `Σ_m vec(K_m) vec(K_m)†` (column-major vec). Two channels
    /// are equal as superoperators exactly when their Choi matrices agree,
    /// which makes this the canonical fingerprint for channel comparisons;
    /// it is insensitive to phase freedom in the Kraus decomposition.
    pub fn choi(&self) -> Result<Operator> {
        let dim = 1usize << self.n_qubits;
        let choi_dim = dim * dim;
        let mut c = DMatrix::from_element(choi_dim, choi_dim, C_ZERO);
        for k in &self.kraus_ops {
            let v = DVector::from_column_slice(k.matrix().as_slice());
            c += &v * v.adjoint();
        }
        Operator::new(2 * self.n_qubits, c)
    }
}

// ---------------------------------------------------------------------------
// Fidelity
// ---------------------------------------------------------------------------

/// `⟨ψ|ρ|ψ⟩`, the overlap fidelity of a state with a pure reference.
pub fn fidelity_with_pure(rho: &DensityMatrix, psi: &StateVector) -> Result<f64> {
    check_same_qubits(rho.n_qubits(), psi.n_qubits(), "fidelity")?;
    let v = rho.matrix() * psi.amplitudes();
    let f = take_real(psi.amplitudes().dotc(&v))?;
    if !(-POSITIVITY_TOL..=1.0 + POSITIVITY_TOL).contains(&f) {
        return Err(Error::FidelityOutOfRange(f));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_string_expands_to_identity() {
        let p = PauliString::parse("IIII").unwrap();
        let op = p.to_operator();
        assert_eq!(op.dim(), 16);
        assert!(op.is_hermitian());
        let dist = op.max_entry_distance(&Operator::identity(4).unwrap());
        assert_eq!(dist, 0.0);
    }

    #[test]
    fn z_on_first_qubit_has_unit_expectation_on_all_zeros() {
        let psi = StateVector::basis_state(4, 0).unwrap();
        let op = PauliString::parse("ZIII").unwrap().to_operator();
        assert_eq!(psi.expectation(&op).unwrap(), 1.0);
    }

    #[test]
    fn zz_pair_expectation_on_phased_dicke() {
        // Independent enumeration over the six basis terms: the eigenvalue of
        // Z1Z2 on a basis string is (-1)^(b1+b2), each term carries weight 1/6.
        let terms = [0b0011, 0b1100, 0b0110, 0b1001, 0b0101, 0b1010];
        let expected: f64 = terms
            .iter()
            .map(|b| {
                let b1 = (b >> 3) & 1;
                let b2 = (b >> 2) & 1;
                if (b1 + b2) % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            })
            .sum::<f64>()
            / 6.0;
        assert!((expected - (-1.0 / 3.0)).abs() < 1e-15);

        let psi = crate::states::phased_dicke4();
        let op = PauliString::parse("ZZII").unwrap().to_operator();
        assert!((psi.expectation(&op).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn imaginary_phase_makes_string_non_hermitian() {
        let p = PauliString::parse("iXZ").unwrap();
        assert!(!p.to_operator().is_hermitian());
        let q = PauliString::parse("-XZ").unwrap();
        assert!(q.to_operator().is_hermitian());
    }

    #[test]
    fn pauli_string_display_round_trips() {
        for s in ["ZIII", "-YYII", "iXZ", "-iZZZZ", "XYZI"] {
            let p = PauliString::parse(s).unwrap();
            assert_eq!(PauliString::parse(&p.to_string()).unwrap(), p);
        }
        assert!(PauliString::parse("ABBA").is_err());
        assert!(PauliString::parse("").is_err());
    }

    #[test]
    fn expectation_rejects_non_hermitian_and_mismatched_observables() {
        let psi = StateVector::basis_state(2, 0).unwrap();
        let non_herm = PauliString::parse("iXZ").unwrap().to_operator();
        assert!(matches!(
            psi.expectation(&non_herm),
            Err(Error::NonHermitianObservable)
        ));
        let wrong_dim = Operator::identity(3).unwrap();
        assert!(matches!(
            psi.expectation(&wrong_dim),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn density_matrix_constructor_enforces_invariants() {
        let psi = StateVector::basis_state(2, 1).unwrap();
        let rho = DensityMatrix::pure(&psi);
        assert!((rho.trace() - C_ONE).norm() < 1e-15);
        assert!(rho.check_positive().unwrap() > -1e-12);

        // Non-Hermitian input is rejected.
        let mut m = rho.matrix().clone();
        m[(0, 1)] = c(0.5, 0.0);
        assert!(matches!(
            DensityMatrix::new(2, m),
            Err(Error::NotHermitian { .. })
        ));

        // Wrong trace is rejected.
        let m = DMatrix::from_diagonal_element(4, 4, c(0.5, 0.0));
        assert!(matches!(
            DensityMatrix::new(2, m),
            Err(Error::TraceNotOne { .. })
        ));
    }

    #[test]
    fn identity_channel_preserves_any_state() {
        let rho = random_density(3, 11);
        let ch = KrausChannel::identity(3).unwrap();
        let out = ch.apply(&rho).unwrap();
        assert!(out.max_entry_distance(&rho) < 1e-14);
    }

    #[test]
    fn incomplete_kraus_set_is_rejected() {
        let half = Operator::identity(2).unwrap().scaled(c(0.5, 0.0));
        assert!(matches!(
            KrausChannel::new(2, vec![half]),
            Err(Error::IncompleteKrausSet { .. })
        ));
    }

    #[test]
    fn channel_preserves_trace_and_hermiticity() {
        let rho = random_density(4, 23);
        let ch = crate::noise::second_bs_channel(0.05).unwrap();
        let out = ch.apply(&rho).unwrap();
        assert!((out.trace() - C_ONE).norm() < 1e-12);
        assert_eq!(hermiticity_defect(out.matrix()), 0.0);
    }

    #[test]
    fn fidelity_of_pure_state_with_itself_is_one() {
        let psi = crate::states::phased_dicke4();
        let rho = DensityMatrix::pure(&psi);
        assert!((fidelity_with_pure(&rho, &psi).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fidelity_of_maximally_mixed_is_uniform() {
        let psi = crate::states::phased_dicke4();
        let rho = DensityMatrix::maximally_mixed(4).unwrap();
        assert!((fidelity_with_pure(&rho, &psi).unwrap() - 1.0 / 16.0).abs() < 1e-14);
    }

    #[test]
    fn fidelity_with_pure_matches_squared_overlap() {
        let a = random_state(3, 5);
        let b = random_state(3, 6);
        let rho = DensityMatrix::pure(&a);
        let overlap = b.inner(&a).unwrap().norm_sqr();
        assert!((fidelity_with_pure(&rho, &b).unwrap() - overlap).abs() < 1e-13);
    }

    #[test]
    fn choi_distinguishes_channels_and_matches_itself() {
        let id = KrausChannel::identity(2).unwrap();
        let z1 = PauliString::single(2, 1, Pauli::Z).unwrap().to_operator();
        let deph = KrausChannel::new(
            2,
            vec![
                Operator::identity(2).unwrap().scaled(c(0.5f64.sqrt(), 0.0)),
                z1.scaled(c(0.5f64.sqrt(), 0.0)),
            ],
        )
        .unwrap();
        let d = id.choi().unwrap().max_entry_distance(&deph.choi().unwrap());
        assert!(d > 0.4);
        // Phase freedom on a Kraus operator does not change the Choi matrix.
        let deph_flipped = KrausChannel::new(
            2,
            vec![
                Operator::identity(2).unwrap().scaled(c(0.5f64.sqrt(), 0.0)),
                z1.scaled(c(-(0.5f64.sqrt()), 0.0)),
            ],
        )
        .unwrap();
        assert!(
            deph.choi()
                .unwrap()
                .max_entry_distance(&deph_flipped.choi().unwrap())
                < 1e-15
        );
    }

    // Deterministic pseudo-random test fixtures.
    fn random_state(n: usize, seed: u64) -> StateVector {
        let dim = 1usize << n;
        let mut s = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut v = DVector::from_fn(dim, |_, _| c(next(), next()));
        v /= c(v.norm(), 0.0);
        StateVector::new(n, v).unwrap()
    }

    fn random_density(n: usize, seed: u64) -> DensityMatrix {
        let dim = 1usize << n;
        let mut s = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(3);
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let g = DMatrix::from_fn(dim, dim, |_, _| c(next(), next()));
        let m = &g * g.adjoint();
        let m = &m / m.trace();
        DensityMatrix::new(n, m).unwrap()
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn pauli_strategy() -> impl Strategy<Value = Pauli> {
            prop_oneof![
                Just(Pauli::I),
                Just(Pauli::X),
                Just(Pauli::Y),
                Just(Pauli::Z)
            ]
        }

        fn phase_strategy() -> impl Strategy<Value = PauliPhase> {
            prop_oneof![
                Just(PauliPhase::Plus),
                Just(PauliPhase::Minus),
                Just(PauliPhase::PlusI),
                Just(PauliPhase::MinusI)
            ]
        }

        proptest! {
            #[test]
            fn pauli_strings_are_unitary_and_square_to_phase_squared(
                labels in proptest::collection::vec(pauli_strategy(), 1..=5),
                phase in phase_strategy(),
            ) {
                let p = PauliString::new(labels, phase).unwrap();
                let op = p.to_operator();
                prop_assert!(op.is_unitary(1e-12));
                let sq = op.compose(&op).unwrap();
                let expected = Operator::identity(op.n_qubits()).unwrap()
                    .scaled(phase.to_complex() * phase.to_complex());
                prop_assert!(sq.max_entry_distance(&expected) < 1e-12);
            }

            #[test]
            fn expectation_is_linear_in_the_observable(
                a in -3.0f64..3.0,
                b in -3.0f64..3.0,
                seed in 0u64..512,
            ) {
                let psi = random_state(3, seed);
                let oa = PauliString::parse("XZI").unwrap().to_operator();
                let ob = PauliString::parse("YYZ").unwrap().to_operator();
                let combo = oa.scaled(Complex64::new(a, 0.0))
                    .add(&ob.scaled(Complex64::new(b, 0.0))).unwrap();
                let lhs = psi.expectation(&combo).unwrap();
                let rhs = a * psi.expectation(&oa).unwrap() + b * psi.expectation(&ob).unwrap();
                prop_assert!((lhs - rhs).abs() < 1e-10);
            }
        }
    }
}
