//! Pauli matrices and their embeddings into multi-qubit registers.
//!
//! The computational basis is ordered so that index 0 is the +1 eigenstate of
//! `sigma_z` (written `|+>` throughout), i.e. `sigma_z = diag(1, -1)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::matrix::{kron, ComplexMatrix};

/// Per-site Pauli label; `I` is the identity (the paper's `sigma_0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliLabel {
    I,
    X,
    Y,
    Z,
}

impl PauliLabel {
    /// All four labels in the fixed order used by operator bases.
    pub const ALL: [PauliLabel; 4] = [PauliLabel::I, PauliLabel::X, PauliLabel::Y, PauliLabel::Z];

    /// The three non-identity labels.
    pub const XYZ: [PauliLabel; 3] = [PauliLabel::X, PauliLabel::Y, PauliLabel::Z];

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "0" | "i" | "I" => Ok(PauliLabel::I),
            "x" | "X" => Ok(PauliLabel::X),
            "y" | "Y" => Ok(PauliLabel::Y),
            "z" | "Z" => Ok(PauliLabel::Z),
            other => Err(Error::invalid(format!(
                "unknown Pauli label {other:?}; expected one of 0, x, y, z"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            PauliLabel::I => "0",
            PauliLabel::X => "x",
            PauliLabel::Y => "y",
            PauliLabel::Z => "z",
        }
    }
}

/// The 2x2 Pauli matrix for a label.
pub fn pauli(label: PauliLabel) -> ComplexMatrix {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let entries = match label {
        PauliLabel::I => vec![one, z, z, one],
        PauliLabel::X => vec![z, one, one, z],
        PauliLabel::Y => vec![z, -i, i, z],
        PauliLabel::Z => vec![one, z, z, -one],
    };
    ComplexMatrix::from_vec(2, entries).expect("2x2 entry count is fixed")
}

/// Weight-one operator `sigma_mu^site` on an `nqubits` register.
///
/// `site` is zero-based; site 0 is the leftmost Kronecker factor.
pub fn pauli_on_qubit(label: PauliLabel, site: usize, nqubits: usize) -> Result<ComplexMatrix> {
    if site >= nqubits {
        return Err(Error::invalid(format!(
            "site {site} out of range for {nqubits} qubits"
        )));
    }
    let mut out = if site == 0 {
        pauli(label)
    } else {
        ComplexMatrix::identity(2)
    };
    for k in 1..nqubits {
        let factor = if k == site {
            pauli(label)
        } else {
            ComplexMatrix::identity(2)
        };
        out = kron(&out, &factor);
    }
    Ok(out)
}
