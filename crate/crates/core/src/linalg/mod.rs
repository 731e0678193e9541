//! Dense complex linear algebra and Pauli operator algebra.
//!
//! Everything here works on square `d x d` complex matrices stored row-major.
//! The matrices stay small (d <= 1024, usually 2 or 4), so the
//! implementations favour clarity and exactness over blocking tricks.

mod eigen;
mod matrix;
mod pauli;

pub use eigen::{hermitian_eig, neg_log_density_matrix, unitary_exp, HermitianEigenSystem};
pub use matrix::{kron, ComplexMatrix};
pub use pauli::{pauli, pauli_on_qubit, PauliLabel};

/// Default tolerance for Hermiticity checks (max-abs of `M - M†`).
pub const HERMITICITY_TOL: f64 = 1e-10;
