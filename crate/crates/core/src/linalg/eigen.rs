//! Hermitian eigendecomposition by complex Jacobi rotations, and the two
//! matrix functions built on it: the unitary exponential `e^{-iH}` and the
//! regularized density-matrix logarithm `-ln(rho)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::matrix::ComplexMatrix;

/// Sweep cap for the Jacobi iteration.
const MAX_SWEEPS: usize = 100;

/// Off-diagonal convergence threshold, relative to the Frobenius norm.
const OFF_DIAG_REL_TOL: f64 = 1e-13;

/// Eigendecomposition of a Hermitian matrix.
///
/// Columns of `eigenvectors` are orthonormal eigenvectors, ordered so that
/// `eigenvalues` is ascending; `V diag(lambda) V†` reconstructs the input.
#[derive(Debug, Clone)]
pub struct HermitianEigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Rebuild `V diag(f(lambda)) V†` for an entry-wise spectral function `f`.
    pub fn apply_spectral_fn(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let d = self.dim();
        let v = &self.eigenvectors;
        let weights: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(d);
        for n in 0..d {
            let w = weights[n];
            if w.re == 0.0 && w.im == 0.0 {
                continue;
            }
            for r in 0..d {
                let vr = v[(r, n)] * w;
                for c in 0..d {
                    out[(r, c)] += vr * v[(c, n)].conj();
                }
            }
        }
        out
    }

    /// Reconstruction of the original matrix, `V diag(lambda) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_spectral_fn(|l| Complex64::new(l, 0.0))
    }
}

/// Diagonalize a Hermitian matrix with cyclic complex Jacobi rotations.
///
/// `tol` bounds the accepted Hermiticity residual of the input (max-abs of
/// `M - M†`). Fails with a numerical-failure error carrying the remaining
/// off-diagonal residual if the sweep cap is hit.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<HermitianEigenSystem> {
    let herm_residual = m.hermiticity_residual();
    if herm_residual > tol {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian: residual {herm_residual:.3e} exceeds tol {tol:.3e}"
        )));
    }

    let d = m.dim();
    // Work on the exactly Hermitian part so roundoff in the input cannot
    // leak into the rotations.
    let mut a = ComplexMatrix::from_fn(d, |r, c| (m[(r, c)] + m[(c, r)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(d);

    if d == 1 {
        return Ok(HermitianEigenSystem {
            eigenvalues: vec![a[(0, 0)].re],
            eigenvectors: v,
        });
    }

    let norm = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let stop = OFF_DIAG_REL_TOL * norm;

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        if off_diag_norm(&a) <= stop {
            converged = true;
            break;
        }
        for p in 0..d - 1 {
            for q in p + 1..d {
                let apq = a[(p, q)];
                let beta = apq.norm();
                // Rotating on entries already far below the stop threshold
                // only churns roundoff.
                if beta <= stop / (d as f64) {
                    continue;
                }
                let phase = apq / beta; // e^{i phi}
                let alpha = a[(p, p)].re;
                let gamma = a[(q, q)].re;
                let tau = (gamma - alpha) / (2.0 * beta);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                let cs = Complex64::new(c, 0.0);
                let s_conj_phase = phase.conj() * s; // s e^{-i phi}
                let s_phase = phase * s; // s e^{+i phi}

                // A <- A U, mixing columns p and q
                for i in 0..d {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = cs * aip - s_conj_phase * aiq;
                    a[(i, q)] = s * aip + cs * phase.conj() * aiq;
                }
                // A <- U† A, mixing rows p and q
                for j in 0..d {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = cs * apj - s_phase * aqj;
                    a[(q, j)] = s * apj + cs * phase * aqj;
                }
                // V <- V U
                for i in 0..d {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = cs * vip - s_conj_phase * viq;
                    v[(i, q)] = s * vip + cs * phase.conj() * viq;
                }
                // The rotated pivot is zero analytically; make it exact.
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
            }
        }
    }

    if !converged && off_diag_norm(&a) > stop {
        return Err(Error::NumericalFailure {
            context: "hermitian_eig".to_string(),
            residual: off_diag_norm(&a) / norm,
        });
    }

    // Sort ascending, carrying eigenvector columns along.
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .expect("eigenvalues are finite")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(d, |r, c| v[(r, order[c])]);

    Ok(HermitianEigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diag_norm(a: &ComplexMatrix) -> f64 {
    let d = a.dim();
    let mut sum = 0.0;
    for p in 0..d {
        for q in 0..d {
            if p != q {
                sum += a[(p, q)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// The unitary `e^{-iH}` of a Hermitian matrix, via eigendecomposition.
pub fn unitary_exp(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h, super::HERMITICITY_TOL)?;
    Ok(eig.apply_spectral_fn(|l| Complex64::new(0.0, -l).exp()))
}

/// Regularized `-ln(M)` for a Hermitian PSD matrix (a density matrix).
///
/// Eigenvalues are clamped from below at `lambda_floor` before taking the
/// logarithm, so (near-)pure states produce the finite value
/// `-ln(lambda_floor)` on their null space instead of a singularity.
pub fn neg_log_density_matrix(m: &ComplexMatrix, lambda_floor: f64) -> Result<ComplexMatrix> {
    if !(lambda_floor > 0.0 && lambda_floor < 1.0) {
        return Err(Error::invalid(format!(
            "lambda_floor must lie in (0, 1), got {lambda_floor:e}"
        )));
    }
    let eig = hermitian_eig(m, super::HERMITICITY_TOL)?;
    Ok(eig.apply_spectral_fn(|l| Complex64::new(-l.max(lambda_floor).ln(), 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli::{pauli, PauliLabel};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let raw = ComplexMatrix::from_fn(d, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        ComplexMatrix::from_fn(d, |r, c| (raw[(r, c)] + raw[(c, r)].conj()) * 0.5)
    }

    #[test]
    fn diagonal_matrix_sorts_ascending() {
        let mut m = ComplexMatrix::zeros(3);
        m[(0, 0)] = Complex64::new(3.0, 0.0);
        m[(1, 1)] = Complex64::new(1.0, 0.0);
        m[(2, 2)] = Complex64::new(2.0, 0.0);
        let eig = hermitian_eig(&m, 1e-10).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 2.0, 3.0]);
        // eigenvectors are a permutation of the basis
        for col in 0..3 {
            let nonzero: Vec<usize> = (0..3)
                .filter(|&r| eig.eigenvectors[(r, col)].norm() > 0.5)
                .collect();
            assert_eq!(nonzero.len(), 1);
        }
    }

    #[test]
    fn sigma_x_spectrum() {
        let eig = hermitian_eig(&pauli(PauliLabel::X), 1e-10).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn seeded_random_reconstruction_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(421);
        let m = random_hermitian(4, &mut rng);
        let eig = hermitian_eig(&m, 1e-10).unwrap();
        assert!(eig.reconstruct().max_abs_diff(&m) <= 1e-10);
        assert!(
            eig.eigenvectors
                .dagger()
                .matmul(&eig.eigenvectors)
                .max_abs_diff(&ComplexMatrix::identity(4))
                <= 1e-10
        );
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let mut m = ComplexMatrix::zeros(2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            hermitian_eig(&m, 1e-10),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn unitary_exp_of_zero_is_identity() {
        let u = unitary_exp(&ComplexMatrix::zeros(3)).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(3)) <= 1e-14);
    }

    #[test]
    fn unitary_exp_half_pi_sigma_x() {
        // e^{-i (pi/2) sigma_x} = -i sigma_x
        let h = pauli(PauliLabel::X).scale_re(std::f64::consts::FRAC_PI_2);
        let u = unitary_exp(&h).unwrap();
        let expected = pauli(PauliLabel::X).scale(Complex64::new(0.0, -1.0));
        assert!(u.max_abs_diff(&expected) <= 1e-12);
    }

    #[test]
    fn unitary_exp_random_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = random_hermitian(4, &mut rng);
        let u = unitary_exp(&h).unwrap();
        assert!(u.unitarity_residual() <= 1e-12);
    }

    #[test]
    fn neg_log_of_maximally_mixed() {
        let rho = ComplexMatrix::identity(2).scale_re(0.5);
        let out = neg_log_density_matrix(&rho, 1e-12).unwrap();
        let expected = ComplexMatrix::identity(2).scale_re(2.0_f64.ln());
        assert!(out.max_abs_diff(&expected) <= 1e-14);
    }

    #[test]
    fn neg_log_of_diagonal_mixture() {
        // scalar-log oracle: diag(0.75, 0.25) -> diag(-ln 0.75, -ln 0.25)
        let mut rho = ComplexMatrix::zeros(2);
        rho[(0, 0)] = Complex64::new(0.75, 0.0);
        rho[(1, 1)] = Complex64::new(0.25, 0.0);
        let out = neg_log_density_matrix(&rho, 1e-12).unwrap();
        assert!((out[(0, 0)].re - 0.2876820724517809).abs() <= 1e-14);
        assert!((out[(1, 1)].re - 1.3862943611198906).abs() <= 1e-14);
        assert!(out[(0, 1)].norm() <= 1e-14);
    }

    #[test]
    fn neg_log_clamps_pure_state() {
        // |+><+| with floor 1e-12: 0 on |+>, -ln(1e-12) = 27.631... on |->
        let mut rho = ComplexMatrix::zeros(2);
        rho[(0, 0)] = Complex64::new(1.0, 0.0);
        let out = neg_log_density_matrix(&rho, 1e-12).unwrap();
        assert!(out[(0, 0)].norm() <= 1e-12);
        assert!((out[(1, 1)].re - 27.631021115928547).abs() <= 1e-9);
        assert!(out[(0, 1)].norm() <= 1e-14);
    }

    #[test]
    fn neg_log_rejects_bad_floor() {
        let rho = ComplexMatrix::identity(2).scale_re(0.5);
        assert!(neg_log_density_matrix(&rho, 0.0).is_err());
        assert!(neg_log_density_matrix(&rho, 1.0).is_err());
        assert!(neg_log_density_matrix(&rho, -1e-3).is_err());
    }
}
