//! Exact desk-scale simulation of the 4-qubit phased Dicke experiment:
//! state preparation, controlled dephasing channels, structural
//! entanglement witnesses and the bounds derived from them, plus a
//! numerical oracle certifying the witness property over product states.
//!
//! Conventions, used consistently everywhere:
//!
//! * qubit 1 is the most significant bit of a computational-basis index,
//!   and public qubit indices are 1-based;
//! * spin operators are the Pauli operators with eigenvalues ±1;
//! * dephasing strengths live in `[0, 1/2]`, with `1/2` full dephasing;
//! * scalars are `f64`/`Complex64`; every tolerance is stated relative to
//!   double precision.
//!
//! Everything is immutable after construction and the operations are pure
//! functions, so values can be shared freely across threads.

pub mod error;
pub mod noise;
pub mod oracle;
pub mod registry;
pub mod states;
pub mod tensor;
pub mod witness;

pub use error::{Error, Result};
pub use tensor::{
    DensityMatrix, KrausChannel, Operator, Pauli, PauliPhase, PauliString, StateVector,
};
