//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by state, operator, channel and witness construction.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {0} outside the supported range 1..={max}", max = crate::tensor::MAX_QUBITS)]
    UnsupportedQubitCount(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("state vector norm deviates from 1 by {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    #[error("matrix is not Hermitian (max entry deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("trace deviates from 1 by {deviation:.3e}")]
    TraceNotOne { deviation: f64 },

    #[error("matrix has eigenvalue {eigenvalue:.3e} below the positivity tolerance")]
    NotPositive { eigenvalue: f64 },

    #[error("observable must be Hermitian")]
    NonHermitianObservable,

    #[error("expectation value has imaginary residue {residue:.3e}")]
    ImaginaryResidue { residue: f64 },

    #[error("Kraus operators do not sum to the identity (deviation {deviation:.3e})")]
    IncompleteKrausSet { deviation: f64 },

    #[error("parameter {name} = {value} outside [{min}, {max}]")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error(
        "conjugated operator is not a single Pauli string (off-basis residual {residual:.3e})"
    )]
    NotPauliString { residual: f64 },

    #[error("cannot parse Pauli string '{0}'")]
    PauliParse(String),

    #[error("witness trace must be positive, got {0}")]
    NonPositiveWitnessTrace(f64),

    #[error("fidelity {0} outside [0, 1] beyond tolerance")]
    FidelityOutOfRange(f64),

    #[error("invalid oracle configuration: {0}")]
    InvalidOracleConfig(String),

    #[error("unknown witness '{0}'")]
    UnknownWitness(String),

    #[error("unknown state '{0}'")]
    UnknownState(String),

    #[error("unknown calibration kind '{0}'")]
    UnknownCalibration(String),

    #[error("invalid arguments for state '{name}': {reason}")]
    InvalidStateArgs { name: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
