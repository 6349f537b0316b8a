//! Dense complex kernels: Hermitian eigendecomposition, unitary exponentials,
//! partial transposes, commutators and joint diagonalization.

mod eig;
mod matrix;
mod ops;
mod simdiag;

pub use eig::{hermitian_eig, unitary_exp_hermitian, HermitianEig, HERMITIAN_TOL};
pub use matrix::ComplexMatrix;
pub use ops::{
    commutator, commutator_norm, partial_transpose, trace_environment, trace_system, Subsystem,
};
pub use simdiag::{simultaneous_diagonalize, SimultaneousBasis, DEGENERACY_THRESHOLD};

pub use num_complex::Complex64;
