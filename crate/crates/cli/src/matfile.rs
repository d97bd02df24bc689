//! Density-matrix file format: JSON with the qubit count and a row-major
//! array of `[re, im]` pairs. Files are accepted when Hermitian and
//! unit-trace within 1e-8, then canonicalized onto the exact invariants.

use std::path::Path;

use anyhow::{bail, ensure, Context};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use dicke_witness::DensityMatrix;

/// Acceptance tolerance for files; interior representations are tighter.
const FILE_TOL: f64 = 1e-8;

#[derive(Debug, Serialize, Deserialize)]
pub struct DensityMatrixFile {
    pub n_qubits: usize,
    /// Row-major `[re, im]` pairs, `4^n_qubits` of them.
    pub entries: Vec<[f64; 2]>,
}

pub fn read_density_matrix(path: &Path) -> anyhow::Result<DensityMatrix> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading density matrix file {}", path.display()))?;
    let file: DensityMatrixFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing density matrix file {}", path.display()))?;
    density_matrix_from_file(&file).with_context(|| format!("in {}", path.display()))
}

pub fn density_matrix_from_file(file: &DensityMatrixFile) -> anyhow::Result<DensityMatrix> {
    let n = file.n_qubits;
    if n == 0 || n > dicke_witness::tensor::MAX_QUBITS {
        bail!("unsupported qubit count {n}");
    }
    let dim = 1usize << n;
    ensure!(
        file.entries.len() == dim * dim,
        "expected {} entries for {n} qubits, got {}",
        dim * dim,
        file.entries.len()
    );
    let m = DMatrix::from_fn(dim, dim, |r, c| {
        let [re, im] = file.entries[r * dim + c];
        Complex64::new(re, im)
    });

    let herm = (0..dim)
        .flat_map(|i| (i..dim).map(move |j| (i, j)))
        .map(|(i, j)| (m[(i, j)] - m[(j, i)].conj()).norm())
        .fold(0.0f64, f64::max);
    ensure!(
        herm <= FILE_TOL,
        "matrix must be Hermitian within {FILE_TOL}, deviation {herm:.3e}"
    );
    let tr = m.trace();
    ensure!(
        (tr - Complex64::new(1.0, 0.0)).norm() <= FILE_TOL,
        "matrix must have unit trace within {FILE_TOL}, got {tr}"
    );

    // Canonicalize onto the exact invariants before constructing.
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let m = &m / m.trace();
    let rho = DensityMatrix::new(n, m)?;
    rho.check_positive()
        .context("matrix is not positive semidefinite")?;
    Ok(rho)
}

pub fn write_density_matrix(path: &Path, rho: &DensityMatrix) -> anyhow::Result<()> {
    let dim = rho.dim();
    let entries = (0..dim)
        .flat_map(|r| (0..dim).map(move |c| (r, c)))
        .map(|(r, c)| {
            let e = rho.matrix()[(r, c)];
            [e.re, e.im]
        })
        .collect();
    let file = DensityMatrixFile {
        n_qubits: rho.n_qubits(),
        entries,
    };
    let mut text = serde_json::to_string(&file)?;
    text.push('\n');
    std::fs::write(path, text)
        .with_context(|| format!("writing density matrix file {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use dicke_witness::states::phased_dicke4;

    #[test]
    fn round_trips_the_dicke_projector() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dicke.json");
        let rho = DensityMatrix::pure(&phased_dicke4());
        write_density_matrix(&path, &rho).unwrap();
        let loaded = read_density_matrix(&path).unwrap();
        assert!(loaded.max_entry_distance(&rho) < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian_and_wrong_trace() {
        let mut file = DensityMatrixFile {
            n_qubits: 1,
            entries: vec![[0.5, 0.0], [0.3, 0.0], [0.0, 0.0], [0.5, 0.0]],
        };
        assert!(density_matrix_from_file(&file).is_err());

        file.entries = vec![[0.9, 0.0], [0.0, 0.0], [0.0, 0.0], [0.5, 0.0]];
        assert!(density_matrix_from_file(&file).is_err());

        file.entries = vec![[0.5, 0.0]];
        assert!(density_matrix_from_file(&file).is_err());
    }

    #[test]
    fn rejects_negative_matrices() {
        // Hermitian, unit trace, but an eigenvalue is -0.25.
        let file = DensityMatrixFile {
            n_qubits: 1,
            entries: vec![[1.25, 0.0], [0.0, 0.0], [0.0, 0.0], [-0.25, 0.0]],
        };
        let err = density_matrix_from_file(&file).unwrap_err();
        assert!(format!("{err:#}").contains("positive"));
    }

    #[test]
    fn small_deviations_are_canonicalized() {
        let eps = 1e-9;
        let file = DensityMatrixFile {
            n_qubits: 1,
            entries: vec![[0.5 + eps, 0.0], [0.1, eps], [0.1, 0.0], [0.5, 0.0]],
        };
        let rho = density_matrix_from_file(&file).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
    }
}
