use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{DephasingModel, Dynamics};
use crate::error::{Error, Result};
use crate::linalg::{Complex64, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Independent Gaussian `H_E`, `V_k`; Ginibre initial state.
    GenericHermitian,
    /// Every generator and `R(0)` diagonal in one shared random basis.
    CommutingFamily,
    /// Generic generators, `R(0) = 1/M`.
    MixedEnvironment,
    /// Generic generators, `R(0) = |v⟩⟨v|`.
    PureEnvironment,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::GenericHermitian,
        Family::CommutingFamily,
        Family::MixedEnvironment,
        Family::PureEnvironment,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub seed: u64,
    pub count: usize,
    pub n: usize,
    pub m: usize,
    pub family: Family,
}

/// Draws instance `index` of the ensemble. Instance `i` uses ChaCha stream `i`
/// of the seed, so the result depends only on `(spec, index)`.
pub fn random_instance(spec: &EnsembleSpec, index: usize) -> Result<DephasingModel> {
    if index >= spec.count {
        return Err(Error::IndexOutOfRange(format!(
            "instance {index} of an ensemble with {} members",
            spec.count
        )));
    }
    if spec.n < 2 || spec.m < 1 {
        return Err(Error::DimensionMismatch(format!(
            "ensemble needs n >= 2 and m >= 1, got n = {}, m = {}",
            spec.n, spec.m
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    let (n, m) = (spec.n, spec.m);

    let amplitudes = normalized(&gaussian_vector(&mut rng, n));

    let (env_hamiltonian, couplings, initial_env) = match spec.family {
        Family::CommutingFamily => {
            let q = random_unitary(&mut rng, m);
            let rotate =
                |d: Vec<f64>| &(&q * &ComplexMatrix::from_real_diagonal(&d)) * &q.adjoint();
            let h = rotate(real_gaussians(&mut rng, m));
            let v: Vec<_> = (0..n)
                .map(|_| rotate(real_gaussians(&mut rng, m)))
                .collect();
            let weights: Vec<f64> = gaussian_vector(&mut rng, m)
                .iter()
                .map(|z| z.norm_sqr())
                .collect();
            let total: f64 = weights.iter().sum();
            let r0 = rotate(weights.iter().map(|w| w / total).collect()).hermitian_part();
            (h, v, r0)
        }
        family => {
            let h = random_hermitian(&mut rng, m);
            let v: Vec<_> = (0..n).map(|_| random_hermitian(&mut rng, m)).collect();
            let r0 = match family {
                Family::GenericHermitian => {
                    let g = ginibre(&mut rng, m);
                    let gg = &g * &g.adjoint();
                    let tr = gg.trace().re;
                    gg.scale_real(1.0 / tr).hermitian_part()
                }
                Family::MixedEnvironment => {
                    ComplexMatrix::from_real_diagonal(&vec![1.0 / m as f64; m])
                }
                Family::PureEnvironment => {
                    ComplexMatrix::outer(&normalized(&gaussian_vector(&mut rng, m)))
                }
                Family::CommutingFamily => unreachable!(),
            };
            (h, v, r0)
        }
    };

    Ok(DephasingModel {
        n,
        m,
        amplitudes,
        initial_env,
        dynamics: Dynamics::Hamiltonian {
            env_hamiltonian,
            couplings,
        },
        system_energies: None,
    })
}

fn standard_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| standard_complex(rng)).collect()
}

fn real_gaussians<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

fn normalized(v: &[Complex64]) -> Vec<Complex64> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|z| z / norm).collect()
}

fn ginibre<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |_, _| standard_complex(rng))
}

/// `(G + G†)/2` with standard complex Gaussian `G`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ginibre(rng, dim).hermitian_part()
}

/// Haar-random unitary from Gram–Schmidt on Ginibre columns.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = ginibre(rng, dim);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for c in 0..dim {
        let mut v = g.column(c);
        // two passes keep the columns orthogonal to working precision
        for _ in 0..2 {
            for q in &cols {
                let overlap: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, a) in v.iter_mut().zip(q) {
                    *x -= overlap * a;
                }
            }
        }
        cols.push(normalized(&v));
    }
    ComplexMatrix::from_fn(dim, dim, |r, c| cols[c][r])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;

    fn spec(family: Family) -> EnsembleSpec {
        EnsembleSpec {
            seed: 42,
            count: 3,
            n: 3,
            m: 2,
            family,
        }
    }

    #[test]
    fn deterministic() {
        let a = random_instance(&spec(Family::GenericHermitian), 0).unwrap();
        let b = random_instance(&spec(Family::GenericHermitian), 0).unwrap();
        assert_eq!(a, b);
        let c = random_instance(&spec(Family::GenericHermitian), 1).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn mixed_environment_is_exactly_maximally_mixed() {
        let m = random_instance(&spec(Family::MixedEnvironment), 2).unwrap();
        assert_eq!(
            m.initial_env,
            ComplexMatrix::from_real_diagonal(&[0.5, 0.5])
        );
    }

    #[test]
    fn index_out_of_range() {
        assert!(matches!(
            random_instance(&spec(Family::PureEnvironment), 3),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn every_family_validates() {
        for family in Family::ALL {
            for m in 1..=4 {
                let s = EnsembleSpec {
                    m,
                    count: 4,
                    ..spec(family)
                };
                for i in 0..s.count {
                    validate(random_instance(&s, i).unwrap()).unwrap();
                }
            }
        }
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        assert!(random_unitary(&mut rng, 5).unitarity_defect() < 1e-13);
    }
}
