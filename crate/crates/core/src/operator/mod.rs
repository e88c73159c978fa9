//! Sparse Pauli-string operators and the model Hamiltonians built from them.

mod dense;
mod models;
mod pauli_op;
mod string;

pub use dense::{hermitian_eigenvalues, hermitian_eigh, DenseHermitian, DEFAULT_DENSE_LIMIT};
pub use models::{
    build_parent, build_rg_charge, build_rg_charges, build_rg_hamiltonian, build_xxz, build_xy_hamiltonian,
    parity_operator, total_magnetization,
};
pub(crate) use pauli_op::i_pow;
pub use pauli_op::{ComplexPauliOperator, PauliOperator, HERMITIAN_TOL, PRUNE_TOL};
pub use string::{Pauli, PauliString, MAX_SITES};

/// Number of Pauli strings and the largest coefficient modulus.
pub fn support_count<T: crate::scalar::Real>(op: &PauliOperator<T>) -> (usize, T) {
    op.support_count()
}
