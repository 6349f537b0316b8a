use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eig::{cluster_sorted, hermitian_eig};
use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Relative gap below which two eigenvalues are treated as one degenerate level.
pub const DEGENERACY_THRESHOLD: f64 = 1e-9;

const FALLBACK_SEED: u64 = 0x005e_ed0f_d1a6;

/// Common eigenbasis of a family of commuting normal operators.
#[derive(Debug, Clone)]
pub struct SimultaneousBasis {
    /// Unitary; columns are the shared eigenvectors.
    pub basis: ComplexMatrix,
    /// `diagonals[k][n] = ⟨n| ops[k] |n⟩`.
    pub diagonals: Vec<Vec<Complex64>>,
    /// Largest off-diagonal Frobenius norm left over across all operators.
    pub residual: f64,
}

/// Jointly diagonalizes commuting normal operators.
///
/// The first operator is diagonalized outright; each degenerate eigenspace is
/// then split by the Hermitian and anti-Hermitian parts of the following
/// operators in turn. If the refined basis leaves an off-diagonal residue
/// above `10·tol·dim` (relative to each operator's norm), a random Hermitian
/// combination of all generators is tried before giving up.
pub fn simultaneous_diagonalize(ops: &[ComplexMatrix], tol: f64) -> Result<SimultaneousBasis> {
    let first = ops
        .first()
        .ok_or_else(|| Error::DimensionMismatch("no operators to diagonalize".into()))?;
    for op in ops {
        ComplexMatrix::check_same_square(first, op)?;
    }
    let dim = first.rows();

    let generators: Vec<ComplexMatrix> = ops
        .iter()
        .flat_map(|op| [op.hermitian_part(), op.antihermitian_part()])
        .collect();

    let basis = refine(
        ComplexMatrix::identity(dim),
        vec![(0..dim).collect()],
        &generators,
    )?;
    let (residual, bound_ok) = residual_within_bound(ops, &basis, tol);
    if bound_ok {
        return Ok(finish(ops, basis, residual));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(FALLBACK_SEED);
    let mut combo = ComplexMatrix::zeros(dim, dim);
    for g in &generators {
        let weight: f64 = rng.random_range(-1.0..1.0);
        combo = &combo + &g.scale_real(weight / g.frobenius_norm().max(1.0));
    }
    let mut fallback_gens = vec![combo];
    fallback_gens.extend(generators);
    let basis = refine(
        ComplexMatrix::identity(dim),
        vec![(0..dim).collect()],
        &fallback_gens,
    )?;
    let (residual, bound_ok) = residual_within_bound(ops, &basis, tol);
    if bound_ok {
        return Ok(finish(ops, basis, residual));
    }
    Err(Error::NotCommuting {
        residual,
        bound: 10.0 * tol * dim as f64,
    })
}

fn refine(
    mut basis: ComplexMatrix,
    mut clusters: Vec<Vec<usize>>,
    generators: &[ComplexMatrix],
) -> Result<ComplexMatrix> {
    for g in generators {
        if clusters.iter().all(|c| c.len() == 1) {
            break;
        }
        let threshold = DEGENERACY_THRESHOLD * g.frobenius_norm().max(1.0);
        let mut next = Vec::with_capacity(clusters.len());
        for cluster in clusters {
            if cluster.len() == 1 {
                next.push(cluster);
                continue;
            }
            let sub = basis.select_columns(&cluster);
            let restricted = sub.conjugate_by(g).hermitian_part();
            let eig = hermitian_eig(&restricted, f64::INFINITY)?;
            let rotated = &sub * &eig.eigenvectors;
            for (k, &col) in cluster.iter().enumerate() {
                for r in 0..basis.rows() {
                    basis[(r, col)] = rotated[(r, k)];
                }
            }
            for range in cluster_sorted(&eig.eigenvalues, threshold) {
                next.push(cluster[range].to_vec());
            }
        }
        clusters = next;
    }
    Ok(basis)
}

fn residual_within_bound(ops: &[ComplexMatrix], basis: &ComplexMatrix, tol: f64) -> (f64, bool) {
    let dim = basis.rows() as f64;
    let mut worst = 0.0f64;
    let mut ok = true;
    for op in ops {
        let off = basis.conjugate_by(op).off_diagonal_norm();
        worst = worst.max(off);
        if off > 10.0 * tol * dim * op.frobenius_norm().max(1.0) {
            ok = false;
        }
    }
    (worst, ok)
}

fn finish(ops: &[ComplexMatrix], basis: ComplexMatrix, residual: f64) -> SimultaneousBasis {
    let diagonals = ops
        .iter()
        .map(|op| basis.conjugate_by(op).diagonal())
        .collect();
    SimultaneousBasis {
        basis,
        diagonals,
        residual,
    }
}
