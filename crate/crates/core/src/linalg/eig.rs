use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Default relative tolerance for the Hermiticity precondition.
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 10_000;

/// Spectral decomposition `A = Q Λ Q†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `k` belongs to `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let lambda = ComplexMatrix::from_real_diagonal(&self.eigenvalues);
        &(&self.eigenvectors * &lambda) * &self.eigenvectors.adjoint()
    }

    /// Index ranges of eigenvalues that agree within `threshold`.
    pub fn clusters(&self, threshold: f64) -> Vec<std::ops::Range<usize>> {
        cluster_sorted(&self.eigenvalues, threshold)
    }
}

pub(crate) fn cluster_sorted(values: &[f64], threshold: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k] - values[k - 1] > threshold {
            out.push(start..k);
            start = k;
        }
    }
    out
}

pub(crate) fn check_hermitian(a: &ComplexMatrix, tol: f64) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let defect = a.hermitian_defect();
    let bound = tol * a.frobenius_norm().max(1.0);
    if defect > bound {
        return Err(Error::NotHermitian { defect, bound });
    }
    Ok(())
}

pub fn hermitian_eig(a: &ComplexMatrix, tol: f64) -> Result<HermitianEig> {
    check_hermitian(a, tol)?;
    let n = a.rows();
    // Exact symmetrization removes the sub-tolerance anti-Hermitian residue.
    let sym = a.hermitian_part().to_nalgebra();
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, MAX_SWEEPS).ok_or(Error::NoConvergence)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_nalgebra(&eig.eigenvectors);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors: vectors.select_columns(&order),
    })
}

/// `exp(−i·theta·H)` for Hermitian `H`, via `Q exp(−iΛθ) Q†`.
pub fn unitary_exp_hermitian(h: &ComplexMatrix, theta: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h, HERMITIAN_TOL)?;
    if theta == 0.0 {
        return Ok(ComplexMatrix::identity(h.rows()));
    }
    let phases: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&lambda| Complex64::from_polar(1.0, -lambda * theta))
        .collect();
    let q = &eig.eigenvectors;
    Ok(&(q * &ComplexMatrix::from_diagonal(&phases)) * &q.adjoint())
}
