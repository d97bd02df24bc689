//! The three experimental dephasing channels in Kraus form, their
//! composition into the noisy phased-Dicke state, and the visibility
//! calibration maps.
//!
//! Two operator frames appear. The path channels are naturally written in
//! the frame of the source state |ξ⟩ (plain `Z` strings); conjugating by
//! the Dicke transformation turns them into collective `YY` channels acting
//! on the phased Dicke state. Constructors below say which frame they
//! produce.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::phased_dicke4;
use crate::tensor::{DensityMatrix, KrausChannel, Operator, PauliString};

/// Upper end of the physical dephasing range; `q = 1/2` is full dephasing.
pub const MAX_DEPHASING: f64 = 0.5;

fn check_dephasing(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=MAX_DEPHASING).contains(&value) {
        return Err(Error::ParameterOutOfRange {
            name,
            value,
            min: 0.0,
            max: MAX_DEPHASING,
        });
    }
    Ok(())
}

fn check_visibility(value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::ParameterOutOfRange {
            name: "visibility",
            value,
            min: 0.0,
            max: 1.0,
        });
    }
    Ok(())
}

/// Strengths of the three dephasing channels, each in `[0, 1/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
}

impl NoiseParams {
    pub fn new(q1: f64, q2: f64, q3: f64) -> Result<Self> {
        let p = Self { q1, q2, q3 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_dephasing("q1", self.q1)?;
        check_dephasing("q2", self.q2)?;
        check_dephasing("q3", self.q3)
    }
}

fn weighted(p: &str, w: f64) -> Operator {
    PauliString::parse(p)
        .expect("fixed label strings are valid")
        .to_operator()
        .scaled(Complex64::new(w, 0.0))
}

/// Path dephasing in the |ξ⟩ frame: the optical delay acts on both path
/// qubits at once, with Kraus weights
/// `{(1−q₂)𝟙, √(q₂(1−q₂))Z₁, √(q₂(1−q₂))Z₃, q₂Z₁Z₃}`.
pub fn path_dephasing_channel(q2: f64) -> Result<KrausChannel> {
    check_dephasing("q2", q2)?;
    let s = (q2 * (1.0 - q2)).sqrt();
    KrausChannel::new(
        4,
        vec![
            weighted("IIII", 1.0 - q2),
            weighted("ZIII", s),
            weighted("IIZI", s),
            weighted("ZIZI", q2),
        ],
    )
}

/// The same physical map expressed on the phased Dicke state: a collective
/// channel with Kraus set
/// `{(1−q₂)𝟙, √(q₂(1−q₂))Y₁Y₂, √(q₂(1−q₂))Y₃Y₄, q₂Y₁Y₂Y₃Y₄}`.
/// It is not a product of independent single-qubit channels.
pub fn collective_channel(q2: f64) -> Result<KrausChannel> {
    check_dephasing("q2", q2)?;
    let s = (q2 * (1.0 - q2)).sqrt();
    KrausChannel::new(
        4,
        vec![
            weighted("IIII", 1.0 - q2),
            weighted("YYII", s),
            weighted("IIYY", s),
            weighted("YYYY", q2),
        ],
    )
}

/// Polarization dephasing in the phased-Dicke frame:
/// `{√(1−q₁)𝟙, √q₁ Z₁Z₂}`.
pub fn polarization_channel(q1: f64) -> Result<KrausChannel> {
    check_dephasing("q1", q1)?;
    KrausChannel::new(
        4,
        vec![
            weighted("IIII", (1.0 - q1).sqrt()),
            weighted("ZZII", q1.sqrt()),
        ],
    )
}

/// Polarization dephasing in the |ξ⟩ frame, where it is a plain phase flip
/// on qubit 2: `{√(1−q₁)𝟙, √q₁ Z₂}`.
pub fn polarization_channel_xi_frame(q1: f64) -> Result<KrausChannel> {
    check_dephasing("q1", q1)?;
    KrausChannel::new(
        4,
        vec![
            weighted("IIII", (1.0 - q1).sqrt()),
            weighted("IZII", q1.sqrt()),
        ],
    )
}

/// Imperfect second interference on the beam splitter, acting on the phased
/// Dicke state: `{(1−q₃)𝟙, √(q₃(1−q₃))Z₁, √(q₃(1−q₃))Z₃, q₃Z₁Z₃}`.
pub fn second_bs_channel(q3: f64) -> Result<KrausChannel> {
    check_dephasing("q3", q3)?;
    let s = (q3 * (1.0 - q3)).sqrt();
    KrausChannel::new(
        4,
        vec![
            weighted("IIII", 1.0 - q3),
            weighted("ZIII", s),
            weighted("IIZI", s),
            weighted("ZIZI", q3),
        ],
    )
}

/// The composite mixed state: polarization, then collective, then
/// second-BS dephasing applied to the pure phased-Dicke projector.
///
/// All Kraus operators involved are Pauli strings, so the three channels
/// commute as superoperators and the order is immaterial; this nesting is
/// the canonical one.
pub fn noisy_dicke_state(p: &NoiseParams) -> Result<DensityMatrix> {
    p.validate()?;
    let rho = DensityMatrix::pure(&phased_dicke4());
    let rho = polarization_channel(p.q1)?.apply(&rho)?;
    let rho = collective_channel(p.q2)?.apply(&rho)?;
    second_bs_channel(p.q3)?.apply(&rho)
}

/// Path visibility follows `Ṽ = (1−2q₂)²`, so `q₂ = (1−√v)/2`.
pub fn q2_from_path_visibility(v: f64) -> Result<f64> {
    check_visibility(v)?;
    Ok((1.0 - v.sqrt()) / 2.0)
}

/// Polarization visibility follows `V = 1−2q₁`, so `q₁ = (1−v)/2`.
pub fn q1_from_pol_visibility(v: f64) -> Result<f64> {
    check_visibility(v)?;
    Ok((1.0 - v) / 2.0)
}

/// The second interference obeys the same law as the first path channel:
/// `q₃ = (1−√v)/2`.
pub fn q3_from_bs_visibility(v: f64) -> Result<f64> {
    check_visibility(v)?;
    Ok((1.0 - v.sqrt()) / 2.0)
}
