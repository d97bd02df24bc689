//! Structure-factor operators, the structural witness family, the
//! generalized witness, the multipartite witness, and the fidelity and
//! random-robustness bounds derived from witness expectation values.
//!
//! Spin operators are the Pauli operators (eigenvalues ±1), and qubit
//! positions are unit spaced, `r_i − r_j = i − j`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::noise::NoiseParams;
use crate::tensor::{DensityMatrix, Operator, Pauli, PauliPhase, PauliString, C_ZERO};

/// Spin axis of a structure-factor correlator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn pauli(self) -> Pauli {
        match self {
            Axis::X => Pauli::X,
            Axis::Y => Pauli::Y,
            Axis::Z => Pauli::Z,
        }
    }
}

fn check_sites(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::ParameterOutOfRange {
            name: "n_qubits",
            value: n as f64,
            min: 2.0,
            max: crate::tensor::MAX_QUBITS as f64,
        });
    }
    Ok(())
}

fn pair_sum(
    alpha: Axis,
    beta: Axis,
    n: usize,
    coefficient: impl Fn(i64) -> Complex64,
) -> Result<Operator> {
    check_sites(n)?;
    let dim = 1usize << n;
    let mut m = DMatrix::from_element(dim, dim, C_ZERO);
    for i in 1..=n {
        for j in (i + 1)..=n {
            let mut labels = vec![Pauli::I; n];
            labels[i - 1] = alpha.pauli();
            labels[j - 1] = beta.pauli();
            let term = PauliString::new(labels, PauliPhase::Plus)?.to_operator();
            m += term.matrix() * coefficient(i as i64 - j as i64);
        }
    }
    Operator::new(n, m)
}

/// Symmetrized structure factor `Σ_{i<j} cos(k(i−j)) S_i^α S_j^β`.
///
/// This is the Hermitian combination `(Ŝ(k)+Ŝ(−k))/2` of the raw factor
/// and the form used inside every witness.
pub fn structure_factor(alpha: Axis, beta: Axis, k: f64, n: usize) -> Result<Operator> {
    pair_sum(alpha, beta, n, |d| {
        Complex64::new((k * d as f64).cos(), 0.0)
    })
}

/// Raw structure factor `Σ_{i<j} e^{ik(i−j)} S_i^α S_j^β`; not Hermitian
/// for general `k`.
pub fn structure_factor_raw(alpha: Axis, beta: Axis, k: f64, n: usize) -> Result<Operator> {
    pair_sum(alpha, beta, n, |d| Complex64::from_polar(1.0, k * d as f64))
}

fn check_coefficients(c: [f64; 3]) -> Result<()> {
    for (name, v) in [("c_x", c[0]), ("c_y", c[1]), ("c_z", c[2])] {
        if !(-1.0..=1.0).contains(&v) {
            return Err(Error::ParameterOutOfRange {
                name,
                value: v,
                min: -1.0,
                max: 1.0,
            });
        }
    }
    Ok(())
}

fn pair_count(n: usize) -> f64 {
    // Binomial B(n, 2), exact in integers.
    (n * (n - 1) / 2) as f64
}

/// Parameters of a generalized structural witness: coefficients
/// `c = (c_x, c_y, c_z)` with `|c_α| ≤ 1` and per-axis wave numbers
/// `k = (k^x, k^y, k^z)` in radians per unit spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessSpec {
    pub n_qubits: usize,
    pub c: [f64; 3],
    pub k: [f64; 3],
}

impl WitnessSpec {
    pub fn new(n_qubits: usize, c: [f64; 3], k: [f64; 3]) -> Result<Self> {
        check_sites(n_qubits)?;
        check_coefficients(c)?;
        Ok(Self { n_qubits, c, k })
    }

    pub fn operator(&self) -> Result<Operator> {
        generalized_witness(self.k[0], self.k[1], self.k[2], self.c, self.n_qubits)
    }
}

/// The structural witness `W(k) = 𝟙 − Σ(k)` with
/// `Σ(k) = [c_x S^{xx}(k) + c_y S^{yy}(k) + c_z S^{zz}(k)] / B(n,2)`
/// built from symmetrized structure factors.
pub fn structural_witness(k: f64, c: [f64; 3], n: usize) -> Result<Operator> {
    generalized_witness(k, k, k, c, n)
}

/// Generalization of the structural witness with an independent wave number
/// per axis. Reduces to [`structural_witness`] when the three wave numbers
/// coincide.
pub fn generalized_witness(kx: f64, ky: f64, kz: f64, c: [f64; 3], n: usize) -> Result<Operator> {
    check_sites(n)?;
    check_coefficients(c)?;
    let b = pair_count(n);
    let dim = 1usize << n;
    let mut m = DMatrix::identity(dim, dim);
    for (axis, k, c_a) in [
        (Axis::X, kx, c[0]),
        (Axis::Y, ky, c[1]),
        (Axis::Z, kz, c[2]),
    ] {
        if c_a == 0.0 {
            continue;
        }
        let s = structure_factor(axis, axis, k, n)?;
        m -= s.matrix() * Complex64::new(c_a / b, 0.0);
    }
    Operator::new(n, m)
}

/// The witness `W̄ = 𝟙 − [S^{xx}(π) + S^{yy}(π) − S^{zz}(0)]/6` tuned to the
/// 4-qubit phased Dicke state.
pub fn bar_witness() -> Operator {
    generalized_witness(
        std::f64::consts::PI,
        std::f64::consts::PI,
        0.0,
        [1.0, 1.0, -1.0],
        4,
    )
    .expect("fixed parameters are valid")
}

/// The structural witness `W(π)` with `c = (1,1,1)` on four qubits.
pub fn pi_witness() -> Operator {
    structural_witness(std::f64::consts::PI, [1.0, 1.0, 1.0], 4)
        .expect("fixed parameters are valid")
}

/// The fixed multipartite witness
/// `W_mult = [21 − 2S_xx(π) − 2S_yy(π) + S_zz(0) − 2X⊗4 − 2Y⊗4 − 7Z⊗4]/8`
/// on four qubits.
pub fn multipartite_witness() -> Operator {
    let pi = std::f64::consts::PI;
    let dim = 16;
    let mut m = DMatrix::identity(dim, dim) * Complex64::new(21.0, 0.0);
    let scale = |v: f64| Complex64::new(v, 0.0);
    m -= structure_factor(Axis::X, Axis::X, pi, 4)
        .expect("fixed parameters are valid")
        .matrix()
        * scale(2.0);
    m -= structure_factor(Axis::Y, Axis::Y, pi, 4)
        .expect("fixed parameters are valid")
        .matrix()
        * scale(2.0);
    m += structure_factor(Axis::Z, Axis::Z, 0.0, 4)
        .expect("fixed parameters are valid")
        .matrix();
    for labels in ["XXXX", "YYYY"] {
        m -= PauliString::parse(labels)
            .expect("fixed labels are valid")
            .to_operator()
            .matrix()
            * scale(2.0);
    }
    m -= PauliString::parse("ZZZZ")
        .expect("fixed labels are valid")
        .to_operator()
        .matrix()
        * scale(7.0);
    m /= Complex64::new(8.0, 0.0);
    Operator::new(4, m).expect("dimensions are fixed")
}

/// Fidelity lower bound from a multipartite-witness expectation value:
/// `F ≥ 2/3 − ⟨W_mult⟩/3`.
pub fn fidelity_bound(wmult_value: f64) -> f64 {
    2.0 / 3.0 - wmult_value / 3.0
}

/// Witness value together with the entanglement bounds it implies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub witness_value: f64,
    /// Present only for witnesses that carry a fidelity bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity_lower_bound: Option<f64>,
    /// Lower bound on the random robustness `E_r`; zero when no
    /// entanglement is detected.
    pub random_robustness_lower_bound: f64,
    pub trace_of_witness: f64,
    pub dimension: usize,
}

/// Random-robustness lower bound `E_r ≥ D·|⟨W⟩|/Tr(W)` from a known witness
/// value, clamped to 0 when the value is nonnegative.
pub fn robustness_bound_from_value(witness_value: f64, w: &Operator) -> Result<f64> {
    let tr = w.trace();
    if tr.im.abs() > crate::tensor::IMAG_RESIDUE_TOL {
        return Err(Error::ImaginaryResidue {
            residue: tr.im.abs(),
        });
    }
    if tr.re <= 0.0 {
        return Err(Error::NonPositiveWitnessTrace(tr.re));
    }
    if witness_value >= 0.0 {
        return Ok(0.0);
    }
    let dimension = w.dim() as f64;
    Ok(dimension * witness_value.abs() / tr.re)
}

/// Evaluates a witness on a state and assembles the bound report. The
/// fidelity bound is left unset; callers attach it for witnesses that
/// support one.
pub fn robustness_bound(rho: &DensityMatrix, w: &Operator) -> Result<BoundReport> {
    let witness_value = rho.expectation(w)?;
    let bound = robustness_bound_from_value(witness_value, w)?;
    Ok(BoundReport {
        witness_value,
        fidelity_lower_bound: None,
        random_robustness_lower_bound: bound,
        trace_of_witness: w.trace().re,
        dimension: w.dim(),
    })
}

/// Closed-form expectation values on the noisy Dicke state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormExpectations {
    pub sxx: f64,
    pub syy: f64,
    pub szz: f64,
    pub wbar: f64,
}

/// Polynomial expressions for `⟨S_xx(π)⟩`, `⟨S_yy(π)⟩`, `⟨S_zz(0)⟩` and
/// `⟨W̄⟩` on the composite noisy state.
///
/// The S_yy expression is the symmetric partner of S_xx: at `q₂ = 0` the two
/// coincide. This reading is pinned against the full Kraus-channel
/// computation in the test suite.
pub fn closed_form_expectations(p: &NoiseParams) -> Result<ClosedFormExpectations> {
    p.validate()?;
    let NoiseParams { q1, q2, q3 } = *p;
    let g = (1.0 - q3) * (1.0 - q3);
    let v = (1.0 - 2.0 * q2) * (1.0 - 2.0 * q2);
    let sxx =
        4.0 - (8.0 / 3.0) * q3 * (3.0 - q3) - (16.0 / 3.0) * g * (q1 * v + 2.0 * q2 * (1.0 - q2));
    let syy = 4.0 - (16.0 / 3.0) * q1 * g - (8.0 / 3.0) * q3 * (3.0 - q3);
    let szz = -2.0 + (16.0 / 3.0) * q2 * (1.0 - q2);
    let wbar = 1.0 - (sxx + syy - szz) / 6.0;
    Ok(ClosedFormExpectations {
        sxx,
        syy,
        szz,
        wbar,
    })
}
