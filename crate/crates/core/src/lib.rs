//! Core library for simulating reinforced quantum annealing under Kraus
//! noise and for training a short student model that reproduces the
//! reinforced dynamics.
//!
//! The crate is organized in four layers:
//!
//! - [`linalg`]: dense complex matrices, Pauli algebra, a self-contained
//!   Hermitian eigensolver, the unitary exponential, and the regularized
//!   density-matrix logarithm.
//! - [`qstate`]: pure states, density matrices, Kraus noise channels, and
//!   success-probability metrics.
//! - [`teacher`]: the reinforced annealing dynamics — search instances,
//!   the Grover-optimal schedule, noise-free lookahead, layered noisy
//!   evolution, and running-time analysis.
//! - [`student`]: the learnable short model — parameterized layer
//!   Hamiltonians, forward/backward sweeps, gradient rules with a
//!   finite-difference oracle, the gradient-descent trainer, and noisy
//!   evaluation of trained parameters.
//!
//! All values are plain data: freely clonable, `Send + Sync`, and safe to
//! move between sweep workers. The only stateful object is the seeded
//! generator owned by a single run.

pub mod error;
pub mod linalg;
pub mod qstate;
pub mod seeding;
pub mod student;
pub mod teacher;

pub use error::{Error, Result};
