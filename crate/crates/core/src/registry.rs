//! Name-indexed registries of the witness, state and calibration strategies
//! selectable at runtime. Each family sits behind a common trait so the CLI
//! (or any other front end) resolves plain names to ready-to-use objects.

use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::noise::{
    noisy_dicke_state, q1_from_pol_visibility, q2_from_path_visibility, q3_from_bs_visibility,
    NoiseParams,
};
use crate::states::{phased_dicke4, xi_state};
use crate::tensor::{DensityMatrix, Operator, C_ONE};
use crate::witness::{bar_witness, multipartite_witness, pi_witness};

// ---------------------------------------------------------------------------
// Witness strategies
// ---------------------------------------------------------------------------

/// A named witness construction.
pub trait WitnessStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn operator(&self) -> Operator;
    /// Whether a fidelity lower bound can be derived from this witness's
    /// expectation value.
    fn fidelity_bound_applies(&self) -> bool {
        false
    }
}

struct PiWitness;

impl WitnessStrategy for PiWitness {
    fn name(&self) -> &'static str {
        "w-pi"
    }
    fn summary(&self) -> &'static str {
        "structural witness W(pi) with c = (1, 1, 1) on 4 qubits"
    }
    fn operator(&self) -> Operator {
        pi_witness()
    }
}

struct BarWitness;

impl WitnessStrategy for BarWitness {
    fn name(&self) -> &'static str {
        "wbar"
    }
    fn summary(&self) -> &'static str {
        "generalized witness with k = (pi, pi, 0), c = (1, 1, -1) on 4 qubits"
    }
    fn operator(&self) -> Operator {
        bar_witness()
    }
}

struct MultWitness;

impl WitnessStrategy for MultWitness {
    fn name(&self) -> &'static str {
        "wmult"
    }
    fn summary(&self) -> &'static str {
        "multipartite witness; its value also bounds the Dicke-state fidelity"
    }
    fn operator(&self) -> Operator {
        multipartite_witness()
    }
    fn fidelity_bound_applies(&self) -> bool {
        true
    }
}

struct NegIdentity;

impl WitnessStrategy for NegIdentity {
    fn name(&self) -> &'static str {
        "neg-identity"
    }
    fn summary(&self) -> &'static str {
        "negated identity; a deliberate non-witness whose minimum is -1"
    }
    fn operator(&self) -> Operator {
        Operator::identity(4)
            .expect("4 qubits are supported")
            .scaled(-C_ONE)
    }
}

static WITNESSES: Lazy<Vec<Box<dyn WitnessStrategy>>> = Lazy::new(|| {
    vec![
        Box::new(PiWitness),
        Box::new(BarWitness),
        Box::new(MultWitness),
        Box::new(NegIdentity),
    ]
});

pub fn witnesses() -> &'static [Box<dyn WitnessStrategy>] {
    &WITNESSES
}

pub fn find_witness(name: &str) -> Result<&'static dyn WitnessStrategy> {
    WITNESSES
        .iter()
        .find(|w| w.name() == name)
        .map(|w| w.as_ref())
        .ok_or_else(|| Error::UnknownWitness(name.to_string()))
}

// ---------------------------------------------------------------------------
// State strategies
// ---------------------------------------------------------------------------

/// A named density-matrix source. `args` carries the text after `name:` in
/// a state spec such as `dicke4-noisy:0.05,0.0175,0.05`.
pub trait StateStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn build(&self, args: Option<&str>) -> Result<DensityMatrix>;
}

fn reject_args(name: &str, args: Option<&str>) -> Result<()> {
    if let Some(a) = args {
        return Err(Error::InvalidStateArgs {
            name: name.to_string(),
            reason: format!("takes no arguments, got '{a}'"),
        });
    }
    Ok(())
}

struct Dicke4;

impl StateStrategy for Dicke4 {
    fn name(&self) -> &'static str {
        "dicke4"
    }
    fn summary(&self) -> &'static str {
        "pure 4-qubit phased Dicke state"
    }
    fn build(&self, args: Option<&str>) -> Result<DensityMatrix> {
        reject_args(self.name(), args)?;
        Ok(DensityMatrix::pure(&phased_dicke4()))
    }
}

struct Xi;

impl StateStrategy for Xi {
    fn name(&self) -> &'static str {
        "xi"
    }
    fn summary(&self) -> &'static str {
        "pure source state |xi> of the Dicke preparation"
    }
    fn build(&self, args: Option<&str>) -> Result<DensityMatrix> {
        reject_args(self.name(), args)?;
        Ok(DensityMatrix::pure(&xi_state()))
    }
}

struct MaximallyMixed;

impl StateStrategy for MaximallyMixed {
    fn name(&self) -> &'static str {
        "maximally-mixed"
    }
    fn summary(&self) -> &'static str {
        "white noise 1/16 on 4 qubits"
    }
    fn build(&self, args: Option<&str>) -> Result<DensityMatrix> {
        reject_args(self.name(), args)?;
        DensityMatrix::maximally_mixed(4)
    }
}

struct NoisyDicke4;

impl StateStrategy for NoisyDicke4 {
    fn name(&self) -> &'static str {
        "dicke4-noisy"
    }
    fn summary(&self) -> &'static str {
        "phased Dicke state after the three dephasing channels; args Q1,Q2,Q3"
    }
    fn build(&self, args: Option<&str>) -> Result<DensityMatrix> {
        let args = args.ok_or_else(|| Error::InvalidStateArgs {
            name: self.name().to_string(),
            reason: "expects ':Q1,Q2,Q3', e.g. dicke4-noisy:0.05,0.0175,0.05".to_string(),
        })?;
        let parts: Vec<&str> = args.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidStateArgs {
                name: self.name().to_string(),
                reason: format!("expected three comma-separated values, got '{args}'"),
            });
        }
        let mut q = [0.0f64; 3];
        for (slot, raw) in q.iter_mut().zip(&parts) {
            *slot = raw.trim().parse().map_err(|_| Error::InvalidStateArgs {
                name: self.name().to_string(),
                reason: format!("cannot parse '{raw}' as a number"),
            })?;
        }
        noisy_dicke_state(&NoiseParams::new(q[0], q[1], q[2])?)
    }
}

static STATES: Lazy<Vec<Box<dyn StateStrategy>>> = Lazy::new(|| {
    vec![
        Box::new(Dicke4),
        Box::new(Xi),
        Box::new(MaximallyMixed),
        Box::new(NoisyDicke4),
    ]
});

pub fn states() -> &'static [Box<dyn StateStrategy>] {
    &STATES
}

pub fn find_state(name: &str) -> Result<&'static dyn StateStrategy> {
    STATES
        .iter()
        .find(|s| s.name() == name)
        .map(|s| s.as_ref())
        .ok_or_else(|| Error::UnknownState(name.to_string()))
}

/// Resolves a `name` or `name:args` spec against the state registry.
pub fn resolve_state(spec: &str) -> Result<DensityMatrix> {
    let (name, args) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    find_state(name)?.build(args)
}

// ---------------------------------------------------------------------------
// Visibility calibrations
// ---------------------------------------------------------------------------

/// A named map from an interference visibility to a dephasing strength.
pub trait CalibrationStrategy: Send + Sync {
    fn kind(&self) -> &'static str;
    /// Which channel parameter the map produces.
    fn parameter(&self) -> &'static str;
    fn calibrate(&self, v: f64) -> Result<f64>;
}

struct PathCalibration;

impl CalibrationStrategy for PathCalibration {
    fn kind(&self) -> &'static str {
        "path"
    }
    fn parameter(&self) -> &'static str {
        "q2"
    }
    fn calibrate(&self, v: f64) -> Result<f64> {
        q2_from_path_visibility(v)
    }
}

struct PolarizationCalibration;

impl CalibrationStrategy for PolarizationCalibration {
    fn kind(&self) -> &'static str {
        "polarization"
    }
    fn parameter(&self) -> &'static str {
        "q1"
    }
    fn calibrate(&self, v: f64) -> Result<f64> {
        q1_from_pol_visibility(v)
    }
}

struct BsCalibration;

impl CalibrationStrategy for BsCalibration {
    fn kind(&self) -> &'static str {
        "bs"
    }
    fn parameter(&self) -> &'static str {
        "q3"
    }
    fn calibrate(&self, v: f64) -> Result<f64> {
        q3_from_bs_visibility(v)
    }
}

static CALIBRATIONS: Lazy<Vec<Box<dyn CalibrationStrategy>>> = Lazy::new(|| {
    vec![
        Box::new(PathCalibration),
        Box::new(PolarizationCalibration),
        Box::new(BsCalibration),
    ]
});

pub fn calibrations() -> &'static [Box<dyn CalibrationStrategy>] {
    &CALIBRATIONS
}

pub fn find_calibration(kind: &str) -> Result<&'static dyn CalibrationStrategy> {
    CALIBRATIONS
        .iter()
        .find(|c| c.kind() == kind)
        .map(|c| c.as_ref())
        .ok_or_else(|| Error::UnknownCalibration(kind.to_string()))
}
