//! Library half of the CLI: sweep execution and serialization, plus the
//! density-matrix file format. The binary in `main.rs` is a thin argument
//! layer over these functions.

pub mod matfile;
pub mod sweep;
