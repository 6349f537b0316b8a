//! Problem instances: the dephasing Hamiltonian (or fixed-instant
//! propagators), the initial system amplitudes and the initial environment
//! state, together with validation, file I/O and seeded ensembles.

mod ensemble;
pub mod io;

pub use ensemble::{random_hermitian, random_instance, random_unitary, EnsembleSpec, Family};

use crate::error::{Error, Result, ValidationErrors};
use crate::linalg::{hermitian_eig, Complex64, ComplexMatrix, HERMITIAN_TOL};

/// Tolerance used for normalization, trace and Hermiticity checks.
pub const MODEL_TOL: f64 = 1e-10;

/// Amplitudes with `|c_k|²` below this are treated as unpopulated levels.
pub const AMPLITUDE_CUT: f64 = 1e-14;

/// How the conditional environment propagators are obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum Dynamics {
    /// `w_k(t) = exp(−i(H_E + V_k)t)` with ħ = 1.
    Hamiltonian {
        env_hamiltonian: ComplexMatrix,
        couplings: Vec<ComplexMatrix>,
    },
    /// The propagators are given directly at one instant; `w_k(0)` is the identity
    /// and no other time is defined.
    Propagators {
        instant: f64,
        propagators: Vec<ComplexMatrix>,
    },
}

impl Dynamics {
    pub fn mode_name(&self) -> &'static str {
        match self {
            Dynamics::Hamiltonian { .. } => "hamiltonian",
            Dynamics::Propagators { .. } => "propagator",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DephasingModel {
    pub n: usize,
    pub m: usize,
    /// System amplitudes `c_k` in the pointer basis.
    pub amplitudes: Vec<Complex64>,
    /// Initial environment state `R(0)`.
    pub initial_env: ComplexMatrix,
    pub dynamics: Dynamics,
    /// Optional free system energies `ε_k`; they only add local phases.
    pub system_energies: Option<Vec<f64>>,
}

/// A model whose invariants have all been checked. Only [`validate`] builds one.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedModel(DephasingModel);

impl ValidatedModel {
    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn m(&self) -> usize {
        self.0.m
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.0.amplitudes
    }

    pub fn initial_env(&self) -> &ComplexMatrix {
        &self.0.initial_env
    }

    pub fn dynamics(&self) -> &Dynamics {
        &self.0.dynamics
    }

    pub fn system_energies(&self) -> Option<&[f64]> {
        self.0.system_energies.as_deref()
    }

    /// Whether system level `k` carries population.
    pub fn is_active(&self, k: usize) -> bool {
        self.0.amplitudes[k].norm_sqr() > AMPLITUDE_CUT
    }

    /// First populated level; conditions are referred to it.
    pub fn reference_level(&self) -> usize {
        (0..self.n()).find(|&k| self.is_active(k)).unwrap_or(0)
    }

    pub fn model(&self) -> &DephasingModel {
        &self.0
    }

    pub fn into_inner(self) -> DephasingModel {
        self.0
    }
}

impl TryFrom<DephasingModel> for ValidatedModel {
    type Error = Error;

    fn try_from(model: DephasingModel) -> Result<Self> {
        validate(model)
    }
}

pub fn validate(model: DephasingModel) -> Result<ValidatedModel> {
    let mut errs = ValidationErrors::default();
    let (n, m) = (model.n, model.m);

    if n < 2 {
        errs.push("n", format!("system dimension must be at least 2, got {n}"));
    }
    if m < 1 {
        errs.push("m", "environment dimension must be at least 1");
    }

    if model.amplitudes.len() != n {
        errs.push(
            "c",
            format!("expected {n} amplitudes, got {}", model.amplitudes.len()),
        );
    } else {
        let norm: f64 = model.amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > MODEL_TOL {
            errs.push("c", format!("sum of |c_k|^2 is {norm}, expected 1"));
        }
    }

    check_env_operator(&mut errs, "r0", &model.initial_env, m);
    if model.initial_env.rows() == m && model.initial_env.is_square() {
        let r0 = &model.initial_env;
        let tr = r0.trace();
        if (tr.re - 1.0).abs() > MODEL_TOL || tr.im.abs() > MODEL_TOL {
            errs.push("r0", format!("trace is {:.12}, expected 1", tr.re));
        }
        if r0.hermitian_defect() <= MODEL_TOL * r0.frobenius_norm().max(1.0) {
            match hermitian_eig(r0, HERMITIAN_TOL) {
                Ok(eig) if eig.eigenvalues[0] < -MODEL_TOL => errs.push(
                    "r0",
                    format!(
                        "not positive semidefinite (min eigenvalue {:.3e})",
                        eig.eigenvalues[0]
                    ),
                ),
                Ok(_) => {}
                Err(e) => errs.push("r0", e.to_string()),
            }
        }
    }

    match &model.dynamics {
        Dynamics::Hamiltonian {
            env_hamiltonian,
            couplings,
        } => {
            check_env_operator(&mut errs, "h_env", env_hamiltonian, m);
            if couplings.len() != n {
                errs.push(
                    "v",
                    format!("expected {n} coupling operators, got {}", couplings.len()),
                );
            }
            for (k, v) in couplings.iter().enumerate() {
                check_env_operator(&mut errs, &format!("v[{k}]"), v, m);
            }
        }
        Dynamics::Propagators {
            instant,
            propagators,
        } => {
            if !instant.is_finite() {
                errs.push("t", "instant must be finite");
            }
            if propagators.len() != n {
                errs.push(
                    "w",
                    format!("expected {n} propagators, got {}", propagators.len()),
                );
            }
            for (k, w) in propagators.iter().enumerate() {
                let path = format!("w[{k}]");
                if w.rows() != m || w.cols() != m {
                    errs.push(
                        path,
                        format!("expected {m}x{m}, got {}x{}", w.rows(), w.cols()),
                    );
                } else {
                    let defect = w.unitarity_defect();
                    if defect > MODEL_TOL * m as f64 {
                        errs.push(path, format!("not unitary (defect {defect:.3e})"));
                    }
                }
            }
        }
    }

    if let Some(eps) = &model.system_energies {
        if eps.len() != n {
            errs.push(
                "epsilon",
                format!("expected {n} energies, got {}", eps.len()),
            );
        }
        if eps.iter().any(|e| !e.is_finite()) {
            errs.push("epsilon", "energies must be finite");
        }
    }

    if errs.is_empty() {
        Ok(ValidatedModel(model))
    } else {
        Err(Error::Validation(errs))
    }
}

fn check_env_operator(errs: &mut ValidationErrors, path: &str, op: &ComplexMatrix, m: usize) {
    if op.rows() != m || op.cols() != m {
        errs.push(
            path,
            format!("expected {m}x{m}, got {}x{}", op.rows(), op.cols()),
        );
        return;
    }
    let defect = op.hermitian_defect();
    if defect > MODEL_TOL * op.frobenius_norm().max(1.0) {
        errs.push(path, format!("not Hermitian (defect {defect:.3e})"));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn qutrit_mixed() -> DephasingModel {
        let s = 1.0 / 3f64.sqrt();
        let h = ComplexMatrix::from_rows(&[
            vec![c(0.3), Complex64::new(0.1, 0.2)],
            vec![Complex64::new(0.1, -0.2), c(-0.4)],
        ])
        .unwrap();
        DephasingModel {
            n: 3,
            m: 2,
            amplitudes: vec![c(s); 3],
            initial_env: ComplexMatrix::from_real_diagonal(&[0.5, 0.5]),
            dynamics: Dynamics::Hamiltonian {
                env_hamiltonian: h.clone(),
                couplings: vec![
                    ComplexMatrix::zeros(2, 2),
                    h.clone(),
                    ComplexMatrix::from_real_diagonal(&[1.0, -1.0]),
                ],
            },
            system_energies: None,
        }
    }

    fn paths(err: Error) -> Vec<String> {
        match err {
            Error::Validation(v) => v.paths().map(str::to_owned).collect(),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn accepts_qutrit_with_mixed_environment() {
        assert!(validate(qutrit_mixed()).is_ok());
    }

    #[test]
    fn accepts_unsuperposed_qubit() {
        let mut m = qutrit_mixed();
        m.n = 2;
        m.amplitudes = vec![c(1.0), c(0.0)];
        if let Dynamics::Hamiltonian { couplings, .. } = &mut m.dynamics {
            couplings.truncate(2);
        }
        let v = validate(m).unwrap();
        assert_eq!(v.reference_level(), 0);
        assert!(!v.is_active(1));
    }

    #[test]
    fn rejects_bad_trace() {
        let mut m = qutrit_mixed();
        m.initial_env = ComplexMatrix::from_real_diagonal(&[0.45, 0.45]);
        assert_eq!(paths(validate(m).unwrap_err()), vec!["r0"]);
    }

    #[test]
    fn rejects_negative_state_and_bad_coupling() {
        let mut m = qutrit_mixed();
        m.initial_env = ComplexMatrix::from_real_diagonal(&[1.2, -0.2]);
        if let Dynamics::Hamiltonian { couplings, .. } = &mut m.dynamics {
            couplings[1][(0, 1)] = Complex64::new(0.0, 1.0);
        }
        let p = paths(validate(m).unwrap_err());
        assert_eq!(p, vec!["r0", "v[1]"]);
    }

    #[test]
    fn rejects_unnormalized_amplitudes_and_wrong_counts() {
        let mut m = qutrit_mixed();
        m.amplitudes = vec![c(1.0), c(1.0), c(0.0)];
        m.system_energies = Some(vec![0.0]);
        let p = paths(validate(m).unwrap_err());
        assert_eq!(p, vec!["c", "epsilon"]);
    }

    #[test]
    fn rejects_non_unitary_propagator() {
        let mut m = qutrit_mixed();
        m.dynamics = Dynamics::Propagators {
            instant: 1.0,
            propagators: vec![
                ComplexMatrix::identity(2),
                ComplexMatrix::identity(2),
                ComplexMatrix::from_real_diagonal(&[1.0, 0.5]),
            ],
        };
        assert_eq!(paths(validate(m).unwrap_err()), vec!["w[2]"]);
    }
}
