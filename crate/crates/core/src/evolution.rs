//! Conditional propagators `w_k(t)`, pair operators `W_ij = w_i w_j†`,
//! conditional environment blocks `R_kl = w_k R(0) w_l†` and the joint state
//! `σ(t) = Σ_kl c_k c_l* |k⟩⟨l| ⊗ R_kl(t)`.

use crate::error::{Error, Result};
use crate::linalg::{trace_environment, unitary_exp_hermitian, Complex64, ComplexMatrix};
use crate::model::{Dynamics, ValidatedModel};

/// Environment propagators conditional on each system pointer state.
#[derive(Debug, Clone)]
pub struct ConditionalPropagators {
    t: f64,
    w: Vec<ComplexMatrix>,
}

impl ConditionalPropagators {
    /// Wraps externally supplied propagators (no unitarity check).
    pub fn from_parts(t: f64, w: Vec<ComplexMatrix>) -> Self {
        Self { t, w }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn w(&self, k: usize) -> &ComplexMatrix {
        &self.w[k]
    }

    pub fn all(&self) -> &[ComplexMatrix] {
        &self.w
    }

    /// Number of system levels.
    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Environment dimension.
    pub fn env_dim(&self) -> usize {
        self.w[0].rows()
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.w.len() {
            return Err(Error::IndexOutOfRange(format!(
                "system level {k} of {}",
                self.w.len()
            )));
        }
        Ok(())
    }
}

pub fn propagators(model: &ValidatedModel, t: f64) -> Result<ConditionalPropagators> {
    let w = match model.dynamics() {
        Dynamics::Hamiltonian {
            env_hamiltonian,
            couplings,
        } => couplings
            .iter()
            .map(|v| unitary_exp_hermitian(&(env_hamiltonian + v), t))
            .collect::<Result<Vec<_>>>()?,
        Dynamics::Propagators {
            instant,
            propagators,
        } => {
            if t == 0.0 {
                vec![ComplexMatrix::identity(model.m()); model.n()]
            } else if (t - instant).abs() <= 1e-12 * instant.abs().max(1.0) {
                propagators.clone()
            } else {
                return Err(Error::TimeNotAvailable {
                    instant: *instant,
                    requested: t,
                });
            }
        }
    };
    Ok(ConditionalPropagators { t, w })
}

/// `W_ij = w_i w_j†`.
pub fn pair_operator(props: &ConditionalPropagators, i: usize, j: usize) -> Result<ComplexMatrix> {
    props.check_index(i)?;
    props.check_index(j)?;
    Ok(props.w(i) * &props.w(j).adjoint())
}

/// `R_kl = w_k R(0) w_l†`.
pub fn conditional_block(
    model: &ValidatedModel,
    props: &ConditionalPropagators,
    k: usize,
    l: usize,
) -> Result<ComplexMatrix> {
    props.check_index(k)?;
    props.check_index(l)?;
    Ok(&(props.w(k) * model.initial_env()) * &props.w(l).adjoint())
}

/// Joint system–environment density matrix, index `r = s·M + e`.
#[derive(Debug, Clone)]
pub struct JointState {
    pub t: f64,
    pub sigma: ComplexMatrix,
    pub dims: (usize, usize),
}

impl JointState {
    /// Environment block attached to `|k⟩⟨l|`, i.e. `c_k c_l* R_kl`.
    pub fn block(&self, k: usize, l: usize) -> ComplexMatrix {
        let m = self.dims.1;
        self.sigma.submatrix(k * m, l * m, m, m)
    }

    pub fn reduced_system(&self) -> ComplexMatrix {
        trace_environment(&self.sigma, self.dims.0, self.dims.1).expect("dims match sigma")
    }

    /// `U_S σ U_S†` with `U_S = Σ_k e^{−iε_k t}|k⟩⟨k|`, the state including the
    /// free system phases.
    pub fn with_system_phases(&self, energies: &[f64]) -> JointState {
        let (n, m) = self.dims;
        assert_eq!(energies.len(), n);
        let phase = |r: usize| Complex64::from_polar(1.0, -energies[r / m] * self.t);
        let sigma = ComplexMatrix::from_fn(n * m, n * m, |r, c| {
            phase(r) * self.sigma[(r, c)] * phase(c).conj()
        });
        JointState {
            t: self.t,
            sigma,
            dims: self.dims,
        }
    }
}

pub fn joint_state(model: &ValidatedModel, props: &ConditionalPropagators) -> Result<JointState> {
    let (n, m) = (model.n(), model.m());
    if props.len() != n || props.env_dim() != m {
        return Err(Error::DimensionMismatch(format!(
            "propagators for {}x{} do not match model {n}x{m}",
            props.len(),
            props.env_dim()
        )));
    }
    let c = model.amplitudes();
    let mut sigma = ComplexMatrix::zeros(n * m, n * m);
    for k in 0..n {
        for l in 0..n {
            let block = conditional_block(model, props, k, l)?.scale(c[k] * c[l].conj());
            sigma.set_submatrix(k * m, l * m, &block);
        }
    }
    Ok(JointState {
        t: props.t(),
        sigma,
        dims: (n, m),
    })
}

/// Joint state including the free system phases when the model carries energies.
pub fn joint_state_with_energies(
    model: &ValidatedModel,
    props: &ConditionalPropagators,
) -> Result<JointState> {
    let state = joint_state(model, props)?;
    Ok(match model.system_energies() {
        Some(eps) => state.with_system_phases(eps),
        None => state,
    })
}

/// Coherence factors `tr R_kl = tr[w_l† w_k R(0)]`; the reduced system state is
/// `ρ_S[k][l] = c_k c_l* · factor[k][l]`.
pub fn decoherence_factors(
    model: &ValidatedModel,
    props: &ConditionalPropagators,
) -> Result<ComplexMatrix> {
    let n = model.n();
    let mut out = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        for l in 0..n {
            out[(k, l)] = conditional_block(model, props, k, l)?.trace();
        }
    }
    Ok(out)
}

/// Full evolution operator `U(t) = Σ_k |k⟩⟨k| ⊗ w_k(t)`.
pub fn global_unitary(props: &ConditionalPropagators) -> ComplexMatrix {
    let (n, m) = (props.len(), props.env_dim());
    let mut u = ComplexMatrix::zeros(n * m, n * m);
    for k in 0..n {
        u.set_submatrix(k * m, k * m, props.w(k));
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{random_instance, validate, EnsembleSpec, Family};

    fn generic(n: usize, m: usize, index: usize) -> ValidatedModel {
        let spec = EnsembleSpec {
            seed: 5,
            count: 10,
            n,
            m,
            family: Family::GenericHermitian,
        };
        validate(random_instance(&spec, index).unwrap()).unwrap()
    }

    #[test]
    fn identity_at_time_zero() {
        let model = generic(3, 3, 0);
        let props = propagators(&model, 0.0).unwrap();
        for w in props.all() {
            assert!(w.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-13);
        }
        let state = joint_state(&model, &props).unwrap();
        let psi = ComplexMatrix::outer(model.amplitudes());
        assert!(state.sigma.max_abs_diff(&psi.kron(model.initial_env())) < 1e-13);
    }

    #[test]
    fn time_reversal_gives_adjoint() {
        let model = generic(3, 4, 1);
        let fwd = propagators(&model, 0.83).unwrap();
        let bwd = propagators(&model, -0.83).unwrap();
        for k in 0..3 {
            assert!(bwd.w(k).max_abs_diff(&fwd.w(k).adjoint()) < 1e-10);
        }
    }

    #[test]
    fn equal_couplings_give_equal_propagators_and_no_dephasing() {
        let mut raw = generic(3, 2, 2).into_inner();
        if let Dynamics::Hamiltonian { couplings, .. } = &mut raw.dynamics {
            let v0 = couplings[0].clone();
            couplings.iter_mut().for_each(|v| *v = v0.clone());
        }
        let model = validate(raw).unwrap();
        let props = propagators(&model, 1.7).unwrap();
        assert_eq!(props.w(1), props.w(0));
        let f = decoherence_factors(&model, &props).unwrap();
        for z in f.as_slice() {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn pair_operator_identities() {
        let model = generic(4, 3, 3);
        let props = propagators(&model, 1.1).unwrap();
        for i in 0..4 {
            assert!(
                pair_operator(&props, i, i)
                    .unwrap()
                    .max_abs_diff(&ComplexMatrix::identity(3))
                    < 1e-12
            );
            for j in 0..4 {
                let wij = pair_operator(&props, i, j).unwrap();
                let wji = pair_operator(&props, j, i).unwrap();
                assert!(wij.max_abs_diff(&wji.adjoint()) < 1e-13);
                assert!((&wij * &wji).max_abs_diff(&ComplexMatrix::identity(3)) < 1e-10);
                let via_zero =
                    &pair_operator(&props, i, 0).unwrap() * &pair_operator(&props, 0, j).unwrap();
                assert!(wij.max_abs_diff(&via_zero) < 1e-12);
            }
        }
        assert!(matches!(
            pair_operator(&props, 4, 0),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn paper_fixture_pair_operator() {
        let model = validate(fixtures::qutrit_mixed_environment()).unwrap();
        let props = propagators(&model, fixtures::QUTRIT_EXAMPLE_INSTANT).unwrap();
        let w12 = pair_operator(&props, 1, 2).unwrap();
        let expected = ComplexMatrix::from_rows(&[
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)],
            vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(w12, expected);
        let f = decoherence_factors(&model, &props).unwrap();
        assert!(f[(1, 2)].norm() < 1e-15);
    }

    #[test]
    fn propagator_mode_time_domain() {
        let model = validate(fixtures::qutrit_mixed_environment()).unwrap();
        assert!(matches!(
            propagators(&model, 0.5),
            Err(Error::TimeNotAvailable { .. })
        ));
        let p0 = propagators(&model, 0.0).unwrap();
        assert_eq!(p0.w(2), &ComplexMatrix::identity(2));
    }

    #[test]
    fn maximally_mixed_environment_blocks_are_invariant() {
        let spec = EnsembleSpec {
            seed: 1,
            count: 1,
            n: 3,
            m: 3,
            family: Family::MixedEnvironment,
        };
        let model = validate(random_instance(&spec, 0).unwrap()).unwrap();
        let props = propagators(&model, 2.4).unwrap();
        for k in 0..3 {
            let rkk = conditional_block(&model, &props, k, k).unwrap();
            assert!(rkk.max_abs_diff(model.initial_env()) < 1e-12);
        }
    }

    #[test]
    fn system_phases_are_local() {
        let mut raw = generic(3, 2, 4).into_inner();
        raw.system_energies = Some(vec![0.0, 1.5, -0.7]);
        let model = validate(raw).unwrap();
        let props = propagators(&model, 0.9).unwrap();
        let plain = joint_state(&model, &props).unwrap();
        let lab = joint_state_with_energies(&model, &props).unwrap();
        assert!(plain.sigma.max_abs_diff(&lab.sigma) > 1e-3);
        let a = plain.reduced_system();
        let b = lab.reduced_system();
        for k in 0..3 {
            assert!((a[(k, k)] - b[(k, k)]).norm() < 1e-14);
        }
    }
}
