//! Builders for the phased Dicke state, its parent state |ξ⟩ and ordinary
//! Dicke states, plus the gate-level transformation between them and its
//! Pauli-conjugation identities.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{
    Operator, Pauli, PauliPhase, PauliString, StateVector, CHANNEL_TOL, C_ONE, C_ZERO,
};

/// Gate alphabet of [`CircuitSpec`].
///
/// `CzBar` is the control-on-|0⟩ variant
/// `C̄Z_ct = |1⟩_c⟨1|⊗𝟙 + |0⟩_c⟨0|⊗Z_t` — note this is *not* the standard
/// controlled-Z, which triggers on |1⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    H,
    X,
    Z,
    Cx,
    CzBar,
}

impl GateKind {
    fn is_controlled(self) -> bool {
        matches!(self, GateKind::Cx | GateKind::CzBar)
    }
}

/// One gate acting on 1-based qubit indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateSpec {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
}

impl GateSpec {
    pub fn single(kind: GateKind, target: usize) -> Result<Self> {
        if kind.is_controlled() {
            return Err(Error::InvalidCircuit(format!(
                "{kind:?} requires a control qubit"
            )));
        }
        Ok(Self {
            kind,
            target,
            control: None,
        })
    }

    pub fn controlled(kind: GateKind, control: usize, target: usize) -> Result<Self> {
        if !kind.is_controlled() {
            return Err(Error::InvalidCircuit(format!(
                "{kind:?} takes no control qubit"
            )));
        }
        if control == target {
            return Err(Error::InvalidCircuit(format!(
                "control and target coincide on qubit {control}"
            )));
        }
        Ok(Self {
            kind,
            target,
            control: Some(control),
        })
    }
}

/// An ordered gate list. Gates are stored in application order: the first
/// entry acts on the state first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitSpec {
    n_qubits: usize,
    gates: Vec<GateSpec>,
}

impl CircuitSpec {
    pub fn new(n_qubits: usize, gates: Vec<GateSpec>) -> Result<Self> {
        let check_index = |q: usize| -> Result<()> {
            if q == 0 || q > n_qubits {
                return Err(Error::InvalidCircuit(format!(
                    "qubit index {q} outside 1..={n_qubits}"
                )));
            }
            Ok(())
        };
        for g in &gates {
            check_index(g.target)?;
            if let Some(c) = g.control {
                check_index(c)?;
            }
        }
        // Constructing the identity validates the qubit count.
        Operator::identity(n_qubits)?;
        Ok(Self { n_qubits, gates })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[GateSpec] {
        &self.gates
    }

    /// Composes the gate list into a single unitary. With gates stored in
    /// application order, the composite is `G_k ··· G_2 G_1`.
    pub fn unitary(&self) -> Result<Operator> {
        let dim = 1usize << self.n_qubits;
        let mut u = DMatrix::identity(dim, dim);
        for g in &self.gates {
            u = gate_matrix(self.n_qubits, g) * u;
        }
        let op = Operator::new(self.n_qubits, u)?;
        let defect = op.unitarity_defect();
        if defect > CHANNEL_TOL {
            return Err(Error::InvalidCircuit(format!(
                "composite is not unitary (defect {defect:.3e})"
            )));
        }
        Ok(op)
    }
}

fn single_qubit(kind: GateKind) -> DMatrix<Complex64> {
    match kind {
        GateKind::H => {
            let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            DMatrix::from_row_slice(2, 2, &[h, h, h, -h])
        }
        GateKind::X => Pauli::X.matrix(),
        GateKind::Z => Pauli::Z.matrix(),
        GateKind::Cx | GateKind::CzBar => unreachable!("controlled kinds handled separately"),
    }
}

fn projector(bit: usize) -> DMatrix<Complex64> {
    let mut p = DMatrix::from_element(2, 2, C_ZERO);
    p[(bit, bit)] = C_ONE;
    p
}

/// Kronecker chain with `factors[q]` placed at 1-based qubit position `q`.
fn kron_chain(n: usize, factors: &[(usize, DMatrix<Complex64>)]) -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(1, 1, C_ONE);
    for q in 1..=n {
        match factors.iter().find(|(pos, _)| *pos == q) {
            Some((_, f)) => m = m.kronecker(f),
            None => m = m.kronecker(&Pauli::I.matrix()),
        }
    }
    m
}

fn gate_matrix(n: usize, g: &GateSpec) -> DMatrix<Complex64> {
    match g.kind {
        GateKind::H | GateKind::X | GateKind::Z => {
            kron_chain(n, &[(g.target, single_qubit(g.kind))])
        }
        GateKind::Cx => {
            let c = g.control.expect("validated at construction");
            kron_chain(n, &[(c, projector(0))])
                + kron_chain(n, &[(c, projector(1)), (g.target, Pauli::X.matrix())])
        }
        GateKind::CzBar => {
            // Control active on |0⟩: |1⟩⟨1|⊗𝟙 + |0⟩⟨0|⊗Z.
            let c = g.control.expect("validated at construction");
            kron_chain(n, &[(c, projector(1))])
                + kron_chain(n, &[(c, projector(0)), (g.target, Pauli::Z.matrix())])
        }
    }
}

// ---------------------------------------------------------------------------
// State builders
// ---------------------------------------------------------------------------

/// The 4-qubit phased Dicke state
/// `(|0011⟩+|1100⟩+|0110⟩+|1001⟩−|0101⟩−|1010⟩)/√6`.
pub fn phased_dicke4() -> StateVector {
    let w = Complex64::new(1.0 / 6.0f64.sqrt(), 0.0);
    let mut amps = vec![C_ZERO; 16];
    amps[0b0011] = w;
    amps[0b1100] = w;
    amps[0b0110] = w;
    amps[0b1001] = w;
    amps[0b0101] = -w;
    amps[0b1010] = -w;
    StateVector::from_amplitudes(4, amps).expect("amplitudes are normalized")
}

/// The source state `|ξ⟩ = (|0010⟩ − |1000⟩ + 2|0111⟩)/√6`.
pub fn xi_state() -> StateVector {
    let w = Complex64::new(1.0 / 6.0f64.sqrt(), 0.0);
    let mut amps = vec![C_ZERO; 16];
    amps[0b0010] = w;
    amps[0b1000] = -w;
    amps[0b0111] = 2.0 * w;
    StateVector::from_amplitudes(4, amps).expect("amplitudes are normalized")
}

/// Ordinary symmetric Dicke state: the equal positive superposition of all
/// `n`-bit strings of Hamming weight `k_excitations`.
pub fn symmetric_dicke(n: usize, k_excitations: usize) -> Result<StateVector> {
    if k_excitations > n {
        return Err(Error::ParameterOutOfRange {
            name: "k_excitations",
            value: k_excitations as f64,
            min: 0.0,
            max: n as f64,
        });
    }
    let dim = 1usize
        .checked_shl(n as u32)
        .ok_or(Error::UnsupportedQubitCount(n))?;
    let indices: Vec<usize> = (0..dim)
        .filter(|b| b.count_ones() as usize == k_excitations)
        .collect();
    let w = Complex64::new(1.0 / (indices.len() as f64).sqrt(), 0.0);
    let mut amps = vec![C_ZERO; dim];
    for b in indices {
        amps[b] = w;
    }
    StateVector::from_amplitudes(n, amps)
}

// ---------------------------------------------------------------------------
// The Dicke transformation and its simpler variant
// ---------------------------------------------------------------------------

fn dicke_circuit() -> CircuitSpec {
    CircuitSpec::new(
        4,
        vec![
            GateSpec::single(GateKind::H, 1).unwrap(),
            GateSpec::single(GateKind::H, 3).unwrap(),
            GateSpec::controlled(GateKind::Cx, 1, 2).unwrap(),
            GateSpec::controlled(GateKind::Cx, 3, 4).unwrap(),
            GateSpec::controlled(GateKind::CzBar, 1, 2).unwrap(),
            GateSpec::controlled(GateKind::CzBar, 3, 4).unwrap(),
            GateSpec::single(GateKind::Z, 4).unwrap(),
        ],
    )
    .expect("fixed circuit is valid")
}

/// The unitary `𝒰 = Z₄ C̄Z₁₂ C̄Z₃₄ CX₁₂ CX₃₄ H₁ H₃` taking |ξ⟩ to the
/// phased Dicke state exactly (no residual global phase).
pub fn dicke_transform() -> Operator {
    dicke_circuit().unitary().expect("fixed circuit is unitary")
}

/// The simpler variant transform together with the global phase it leaves on
/// the phased Dicke state.
#[derive(Debug, Clone)]
pub struct VariantTransform {
    pub operator: Operator,
    /// `⟨D₄ᵖʰ| 𝒰' |ξ⟩` — unit modulus, but not normalized away.
    pub global_phase: Complex64,
}

/// The variant `𝒰' = Z₁ CX₁₂ CX₃₄ H₁ H₃`, which reproduces the phased Dicke
/// state only up to a global phase. The phase is measured and reported
/// rather than silently removed.
pub fn dicke_transform_variant() -> VariantTransform {
    let circuit = CircuitSpec::new(
        4,
        vec![
            GateSpec::single(GateKind::H, 1).unwrap(),
            GateSpec::single(GateKind::H, 3).unwrap(),
            GateSpec::controlled(GateKind::Cx, 1, 2).unwrap(),
            GateSpec::controlled(GateKind::Cx, 3, 4).unwrap(),
            GateSpec::single(GateKind::Z, 1).unwrap(),
        ],
    )
    .expect("fixed circuit is valid");
    let operator = circuit.unitary().expect("fixed circuit is unitary");
    let mapped = operator
        .apply_to(&xi_state())
        .expect("dimensions match by construction");
    let global_phase = phased_dicke4()
        .inner(&mapped)
        .expect("dimensions match by construction");
    VariantTransform {
        operator,
        global_phase,
    }
}

// ---------------------------------------------------------------------------
// Pauli conjugation
// ---------------------------------------------------------------------------

/// Residual tolerated outside the single dominant Pauli component.
const PAULI_RESIDUAL_TOL: f64 = 1e-10;

/// Rewrites `u·p·u†` as a single phased Pauli string by projecting onto the
/// Pauli basis with the normalized Hilbert–Schmidt inner product
/// `Tr(P†M)/2^n`. Fails when the off-basis residual exceeds 1e-10, i.e.
/// when the conjugated operator is not a single string.
pub fn conjugate_pauli(u: &Operator, p: &PauliString) -> Result<PauliString> {
    let n = p.n_qubits();
    if u.n_qubits() != n {
        return Err(Error::DimensionMismatch(format!(
            "conjugating a {n}-qubit Pauli string by a {}-qubit operator",
            u.n_qubits()
        )));
    }
    let dim = 1usize << n;
    let m = u.matrix() * p.to_operator().matrix() * u.matrix().adjoint();

    let mut best_labels = vec![Pauli::I; n];
    let mut best_coeff = C_ZERO;
    for code in 0..4usize.pow(n as u32) {
        let labels = decode_labels(code, n);
        let coeff = pauli_coefficient(&m, &labels, dim);
        if coeff.norm() > best_coeff.norm() {
            best_coeff = coeff;
            best_labels = labels;
        }
    }

    // Parseval over the orthogonal Pauli basis: the summed squared
    // coefficients equal ‖M‖²_HS / 2^n, so the off-basis residual is
    // computable without a second pass.
    let total: f64 = m.iter().map(|e| e.norm_sqr()).sum::<f64>() / dim as f64;
    let residual = (total - best_coeff.norm_sqr()).max(0.0).sqrt();
    if residual > PAULI_RESIDUAL_TOL {
        return Err(Error::NotPauliString { residual });
    }
    let phase = PauliPhase::from_complex(best_coeff, 1e-8)
        .map_err(|_| Error::NotPauliString { residual })?;
    PauliString::new(best_labels, phase)
}

fn decode_labels(code: usize, n: usize) -> Vec<Pauli> {
    const TABLE: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    (0..n).map(|q| TABLE[(code >> (2 * q)) & 3]).collect()
}

fn pauli_coefficient(m: &DMatrix<Complex64>, labels: &[Pauli], dim: usize) -> Complex64 {
    let p = PauliString::new(labels.to_vec(), PauliPhase::Plus)
        .expect("label count validated by caller")
        .to_operator();
    let mut tr = C_ZERO;
    for i in 0..dim {
        for j in 0..dim {
            tr += p.matrix()[(j, i)].conj() * m[(j, i)];
        }
    }
    tr / Complex64::new(dim as f64, 0.0)
}
