use serde::{Deserialize, Serialize};

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Tensor factor of a bipartite system ⊗ environment space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    System,
    Environment,
}

/// Partial transpose of `rho` on the `dim_s · dim_e` space, with composite
/// index `r = s·dim_e + e`.
pub fn partial_transpose(
    rho: &ComplexMatrix,
    dim_s: usize,
    dim_e: usize,
    subsystem: Subsystem,
) -> Result<ComplexMatrix> {
    let dim = dim_s * dim_e;
    if !rho.is_square() || rho.rows() != dim || dim == 0 {
        return Err(Error::DimensionMismatch(format!(
            "partial transpose over {dim_s}x{dim_e} needs a {dim}x{dim} matrix, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    Ok(ComplexMatrix::from_fn(dim, dim, |r, c| {
        let (s, e) = (r / dim_e, r % dim_e);
        let (s2, e2) = (c / dim_e, c % dim_e);
        match subsystem {
            Subsystem::System => rho[(s2 * dim_e + e, s * dim_e + e2)],
            Subsystem::Environment => rho[(s * dim_e + e2, s2 * dim_e + e)],
        }
    }))
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    ComplexMatrix::check_same_square(a, b)?;
    Ok(&(a * b) - &(b * a))
}

/// ‖AB − BA‖_F.
pub fn commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    Ok(commutator(a, b)?.frobenius_norm())
}

/// Partial trace over the environment factor.
pub fn trace_environment(rho: &ComplexMatrix, dim_s: usize, dim_e: usize) -> Result<ComplexMatrix> {
    if rho.rows() != dim_s * dim_e || !rho.is_square() {
        return Err(Error::DimensionMismatch("partial trace shape".into()));
    }
    Ok(ComplexMatrix::from_fn(dim_s, dim_s, |a, b| {
        (0..dim_e)
            .map(|e| rho[(a * dim_e + e, b * dim_e + e)])
            .sum()
    }))
}

/// Partial trace over the system factor.
pub fn trace_system(rho: &ComplexMatrix, dim_s: usize, dim_e: usize) -> Result<ComplexMatrix> {
    if rho.rows() != dim_s * dim_e || !rho.is_square() {
        return Err(Error::DimensionMismatch("partial trace shape".into()));
    }
    Ok(ComplexMatrix::from_fn(dim_e, dim_e, |e, f| {
        (0..dim_s)
            .map(|s| rho[(s * dim_e + e, s * dim_e + f)])
            .sum()
    }))
}
