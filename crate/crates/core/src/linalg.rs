//! Dense symmetric-matrix helpers backed by `nalgebra`.

use nalgebra::DMatrix;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Number of eigenvalues above `tol * scale`.
pub fn numeric_rank(eigenvalues: &[f64], tol: f64, scale: f64) -> usize {
    eigenvalues.iter().filter(|&&l| l > tol * scale).count()
}

/// `n x n` matrix from a row-major slice.
pub fn square(n: usize, entries: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, n, entries)
}
