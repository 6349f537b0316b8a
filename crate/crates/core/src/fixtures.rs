//! Built-in instances.
//!
//! The main fixture is a qutrit in the equal superposition `(|0⟩+|1⟩+|2⟩)/√3`
//! coupled to a single maximally mixed qubit, at an instant where the
//! conditional propagators are `1`, `diag(1, −1)` and `[[0, i], [−i, 0]]`.
//! Every qubit-like condition holds (the environment state is `1/2`), yet
//! the joint state is entangled because the last two propagators do not
//! commute.

use crate::linalg::{Complex64, ComplexMatrix};
use crate::model::{DephasingModel, Dynamics};

/// Time label attached to the fixed-instant fixture.
pub const QUTRIT_EXAMPLE_INSTANT: f64 = 1.0;

/// Partial-transpose spectrum of the fixture state, ascending.
pub const QUTRIT_EXAMPLE_PT_SPECTRUM: [f64; 6] = [
    -1.0 / 6.0,
    -1.0 / 6.0,
    1.0 / 3.0,
    1.0 / 3.0,
    1.0 / 3.0,
    1.0 / 3.0,
];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn example_propagators() -> Vec<ComplexMatrix> {
    let z = c(0.0, 0.0);
    vec![
        ComplexMatrix::identity(2),
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0]),
        ComplexMatrix::from_rows(&[vec![z, c(0.0, 1.0)], vec![c(0.0, -1.0), z]]).expect("2x2"),
    ]
}

fn example_amplitudes() -> Vec<Complex64> {
    vec![c(1.0 / 3f64.sqrt(), 0.0); 3]
}

/// The qutrit fixture in propagator mode.
pub fn qutrit_mixed_environment() -> DephasingModel {
    DephasingModel {
        n: 3,
        m: 2,
        amplitudes: example_amplitudes(),
        initial_env: ComplexMatrix::from_real_diagonal(&[0.5, 0.5]),
        dynamics: Dynamics::Propagators {
            instant: QUTRIT_EXAMPLE_INSTANT,
            propagators: example_propagators(),
        },
        system_energies: None,
    }
}

/// A Hamiltonian-mode model whose propagators pass through the fixture's at
/// `t = 1`: `H_E = 0`, `V_0 = 0`, `V_1 = diag(0, π)` and `V_2 = π·P` with `P`
/// the projector onto the `−1` eigenvector `(1, i)/√2` of `[[0, i], [−i, 0]]`.
pub fn qutrit_mixed_environment_hamiltonian() -> DephasingModel {
    use std::f64::consts::PI;
    let half = 0.5 * PI;
    let projector = ComplexMatrix::from_rows(&[
        vec![c(half, 0.0), c(0.0, -half)],
        vec![c(0.0, half), c(half, 0.0)],
    ])
    .expect("2x2");
    DephasingModel {
        n: 3,
        m: 2,
        amplitudes: example_amplitudes(),
        initial_env: ComplexMatrix::from_real_diagonal(&[0.5, 0.5]),
        dynamics: Dynamics::Hamiltonian {
            env_hamiltonian: ComplexMatrix::zeros(2, 2),
            couplings: vec![
                ComplexMatrix::zeros(2, 2),
                ComplexMatrix::from_real_diagonal(&[0.0, PI]),
                projector,
            ],
        },
        system_energies: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::propagators;
    use crate::model::validate;

    #[test]
    fn hamiltonian_variant_reaches_fixture_at_t1() {
        let model = validate(qutrit_mixed_environment_hamiltonian()).unwrap();
        let props = propagators(&model, 1.0).unwrap();
        for (w, expected) in props.all().iter().zip(example_propagators()) {
            assert!(w.max_abs_diff(&expected) < 1e-14);
        }
    }
}
