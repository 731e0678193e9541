//! The student model: short layered dynamics with parameterized Hamiltonians,
//! trained by gradient descent to reproduce the teacher's noise-free
//! reinforced input-output map.
//!
//! Each training iteration runs one forward and one backward sweep, then
//! updates every layer's coefficients from the frozen sweep states
//! (synchronous update), then clips coefficients to the allowed bound.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, kron, pauli, unitary_exp, ComplexMatrix, PauliLabel};
use crate::qstate::{success_probability, PureState};
use crate::teacher::{
    build_layer_channel, AnnealSchedule, NoiseKind, TeacherConfig,
};

// ---------------------------------------------------------------------------
// Operator bases
// ---------------------------------------------------------------------------

/// The family a coefficient basis was generated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// `(sigma_x, sigma_y, sigma_z)` on one qubit.
    SingleQubit3Term,
    /// All 16 products `sigma_mu (x) sigma_mu'`, `mu, mu' in {0, x, y, z}`,
    /// in lexicographic order.
    TwoQubit16Term,
    /// All weight-one and weight-two Pauli terms on N qubits.
    NBodyOneTwo(usize),
}

/// An ordered list of Hermitian basis operators for layer Hamiltonians
/// `H_l = sum_k theta_{l,k} B_k`.
#[derive(Debug, Clone)]
pub struct OperatorBasis {
    kind: BasisKind,
    operators: Vec<ComplexMatrix>,
    labels: Vec<String>,
}

impl OperatorBasis {
    pub fn single_qubit() -> Self {
        let operators = PauliLabel::XYZ.iter().map(|&l| pauli(l)).collect();
        let labels = PauliLabel::XYZ.iter().map(|l| l.as_str().to_string()).collect();
        Self {
            kind: BasisKind::SingleQubit3Term,
            operators,
            labels,
        }
    }

    pub fn two_qubit() -> Self {
        let mut operators = Vec::with_capacity(16);
        let mut labels = Vec::with_capacity(16);
        for mu in PauliLabel::ALL {
            for mu_p in PauliLabel::ALL {
                operators.push(kron(&pauli(mu), &pauli(mu_p)));
                labels.push(format!("{}{}", mu.as_str(), mu_p.as_str()));
            }
        }
        Self {
            kind: BasisKind::TwoQubit16Term,
            operators,
            labels,
        }
    }

    /// All weight-one (`3N`) and weight-two (`9 N(N-1)/2`) Pauli terms on an
    /// N-qubit register.
    pub fn nbody_one_two(nqubits: usize) -> Result<Self> {
        if nqubits == 0 {
            return Err(Error::invalid("need at least one qubit"));
        }
        let mut operators = Vec::new();
        let mut labels = Vec::new();
        for site in 0..nqubits {
            for mu in PauliLabel::XYZ {
                operators.push(crate::linalg::pauli_on_qubit(mu, site, nqubits)?);
                labels.push(format!("{}@{}", mu.as_str(), site));
            }
        }
        for a in 0..nqubits {
            for b in a + 1..nqubits {
                for mu in PauliLabel::XYZ {
                    for mu_p in PauliLabel::XYZ {
                        let left = crate::linalg::pauli_on_qubit(mu, a, nqubits)?;
                        let right = crate::linalg::pauli_on_qubit(mu_p, b, nqubits)?;
                        operators.push(left.matmul(&right));
                        labels.push(format!("{}@{}{}@{}", mu.as_str(), a, mu_p.as_str(), b));
                    }
                }
            }
        }
        Ok(Self {
            kind: BasisKind::NBodyOneTwo(nqubits),
            operators,
            labels,
        })
    }

    /// The paper's basis for a given Hilbert dimension: 3-term for d = 2,
    /// 16-term for d = 4.
    pub fn for_dim(dim: usize) -> Result<Self> {
        match dim {
            2 => Ok(Self::single_qubit()),
            4 => Ok(Self::two_qubit()),
            d => Err(Error::invalid(format!(
                "no default operator basis for d = {d}; expected 2 or 4"
            ))),
        }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.operators[0].dim()
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// `H_l = sum_k theta_k B_k` over a basis.
pub fn student_hamiltonian(coeffs: &[f64], basis: &OperatorBasis) -> Result<ComplexMatrix> {
    if coeffs.len() != basis.len() {
        return Err(Error::invalid(format!(
            "coefficient count {} does not match basis size {}",
            coeffs.len(),
            basis.len()
        )));
    }
    let mut h = ComplexMatrix::zeros(basis.dim());
    for (theta, op) in coeffs.iter().zip(basis.operators()) {
        if *theta != 0.0 {
            h = &h + &op.scale_re(*theta);
        }
    }
    Ok(h)
}

// ---------------------------------------------------------------------------
// Parameters and learning configuration
// ---------------------------------------------------------------------------

/// Per-layer coefficient vectors with a hard bound `|theta| <= theta_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct StudentParams {
    theta: Vec<Vec<f64>>,
    theta_max: f64,
}

impl StudentParams {
    pub fn zeros(layer_count: usize, basis_len: usize) -> Self {
        Self {
            theta: vec![vec![0.0; basis_len]; layer_count],
            theta_max: 1.0,
        }
    }

    /// Uniform initialization on `[lo, hi)` from a seeded generator.
    pub fn random_uniform(
        layer_count: usize,
        basis_len: usize,
        lo: f64,
        hi: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::invalid(format!(
                "initialization range ({lo}, {hi}) is empty"
            )));
        }
        let theta = (0..layer_count)
            .map(|_| (0..basis_len).map(|_| rng.gen_range(lo..hi)).collect())
            .collect();
        Ok(Self {
            theta,
            theta_max: 1.0,
        })
    }

    pub fn layer_count(&self) -> usize {
        self.theta.len()
    }

    pub fn basis_len(&self) -> usize {
        self.theta.first().map_or(0, Vec::len)
    }

    pub fn theta_max(&self) -> f64 {
        self.theta_max
    }

    pub fn coeffs(&self, layer: usize) -> &[f64] {
        &self.theta[layer]
    }

    pub fn coeffs_mut(&mut self, layer: usize) -> &mut [f64] {
        &mut self.theta[layer]
    }

    /// Hard-clip every coefficient to `[-theta_max, theta_max]`.
    pub fn clip(&mut self) {
        let bound = self.theta_max;
        for layer in &mut self.theta {
            for v in layer {
                *v = v.clamp(-bound, bound);
            }
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.theta
            .iter()
            .flat_map(|l| l.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// How layer gradients are computed during training.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientMode {
    /// Appendix-style closed form for the 3-term single-qubit basis.
    ClosedForm1Q,
    /// Pauli-basis eigenstate update rule for the 16-term two-qubit basis
    /// (the verbatim, unnormalized direction).
    PauliBasis2Q,
    /// Central finite differences; works with any basis and is the reference
    /// for both closed forms.
    FiniteDifference,
}

impl GradientMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            GradientMode::ClosedForm1Q => "closed_form_1q",
            GradientMode::PauliBasis2Q => "pauli_basis_2q",
            GradientMode::FiniteDifference => "finite_difference",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "closed_form_1q" => Ok(GradientMode::ClosedForm1Q),
            "pauli_basis_2q" => Ok(GradientMode::PauliBasis2Q),
            "finite_difference" => Ok(GradientMode::FiniteDifference),
            other => Err(Error::invalid(format!(
                "unknown gradient mode {other:?}"
            ))),
        }
    }
}

/// How the per-layer updates of one iteration are interleaved with sweep
/// recomputation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateOrder {
    /// Update layers in order `0 .. L_s`, propagating each layer's new
    /// unitary into the forward state before the next layer's gradient is
    /// taken (the backward states stay valid because later layers are still
    /// untouched). This is what makes the large single-qubit learning rate
    /// stable, and it matches the cost accounting of one forward
    /// re-propagation per layer.
    Sequential,
    /// One forward and one backward sweep per iteration; every layer is
    /// updated from the frozen states. Order-independent but prone to
    /// overshoot at large learning rates.
    Synchronous,
}

impl UpdateOrder {
    pub fn as_str(&self) -> &'static str {
        match self {
            UpdateOrder::Sequential => "sequential",
            UpdateOrder::Synchronous => "synchronous",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sequential" => Ok(UpdateOrder::Sequential),
            "synchronous" => Ok(UpdateOrder::Synchronous),
            other => Err(Error::invalid(format!("unknown update order {other:?}"))),
        }
    }
}

/// Gradient-descent hyperparameters.
#[derive(Debug, Clone)]
pub struct LearnConfig {
    pub learning_rate: f64,
    pub iterations: usize,
    /// Uniform initialization range `(lo, hi)`.
    pub init_range: (f64, f64),
    pub gradient_mode: GradientMode,
    pub update_order: UpdateOrder,
    pub fd_step: f64,
    pub seed: u64,
}

impl LearnConfig {
    /// The single-qubit preset: `eta = 1`, init on `(-1, 1)`, 100 iterations.
    pub fn single_qubit_preset(seed: u64) -> Self {
        Self {
            learning_rate: 1.0,
            iterations: 100,
            init_range: (-1.0, 1.0),
            gradient_mode: GradientMode::ClosedForm1Q,
            update_order: UpdateOrder::Sequential,
            fd_step: 1e-6,
            seed,
        }
    }

    /// The two-qubit preset: `eta = 0.02`, init on `(-1e-6, 1e-6)`,
    /// 100 iterations.
    pub fn two_qubit_preset(seed: u64) -> Self {
        Self {
            learning_rate: 0.02,
            iterations: 100,
            init_range: (-1e-6, 1e-6),
            gradient_mode: GradientMode::PauliBasis2Q,
            update_order: UpdateOrder::Sequential,
            fd_step: 1e-6,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        // eta = 0 is tolerated as a frozen-trainer baseline
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid(format!(
                "learning rate must be finite and >= 0, got {}",
                self.learning_rate
            )));
        }
        if self.iterations == 0 {
            return Err(Error::invalid("need at least one GD iteration"));
        }
        if !(self.init_range.0 < self.init_range.1) {
            return Err(Error::invalid("initialization range is empty"));
        }
        if !(self.fd_step > 0.0) {
            return Err(Error::invalid("finite-difference step must be positive"));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Teacher target (pure-state reinforced evolution)
// ---------------------------------------------------------------------------

/// The noise-free reinforced teacher output `|psi_{L_t}>`, evolved entirely
/// with pure states: `|psi_{l+1}> = e^{-i H_l(r)} |psi_l>`.
///
/// For a pure state the reinforcing term has the closed form
/// `-ln rho = (-ln lambda_floor) (I - |phi><phi|)` after the eigenvalue
/// clamp, where `|phi>` is the lookahead state. This is an independent code
/// path from the density-matrix teacher and must agree with it at eps = 0.
pub fn teacher_target(cfg: &TeacherConfig, sched: &AnnealSchedule) -> Result<PureState> {
    cfg.validate()?;
    if cfg.noise_strength != 0.0 {
        return Err(Error::invalid(
            "teacher_target requires a noise-free config (eps = 0)".to_string(),
        ));
    }
    if sched.layer_count() != cfg.layer_count {
        return Err(Error::invalid(format!(
            "schedule has {} layers but config says {}",
            sched.layer_count(),
            cfg.layer_count
        )));
    }
    let inst = &cfg.instance;
    let last = cfg.layer_count - 1;
    let log_gain = -cfg.lambda_floor.ln();

    let mut psi = inst.psi_initial().clone();
    for layer in 0..cfg.layer_count {
        let mut h = inst.annealing_hamiltonian(sched.t(layer));
        if cfg.reinforcement != 0.0 {
            let mut look = psi.clone();
            for k in layer..layer + cfg.lookahead {
                let u = unitary_exp(&inst.annealing_hamiltonian(sched.t(k.min(last))))?;
                look = look.evolve(&u)?;
            }
            // (-ln floor)(I - |phi><phi|), scaled by r
            let amps = look.amplitudes();
            let hr = ComplexMatrix::from_fn(inst.dim(), |r, c| {
                let delta = if r == c {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                (delta - amps[r] * amps[c].conj()) * (log_gain * cfg.reinforcement)
            });
            h = &h + &hr;
        }
        psi = psi.evolve(&unitary_exp(&h)?)?;
    }
    Ok(psi)
}

// ---------------------------------------------------------------------------
// Sweeps and the local error
// ---------------------------------------------------------------------------

/// The forward and backward state sequences of one sweep pair.
#[derive(Debug, Clone)]
pub struct SweepStates {
    /// `|phi_0^>> ... |phi_Ls^>>`, with `forward[0] = |psi_0>`.
    pub forward: Vec<PureState>,
    /// `|phi_0^<< ... |phi_Ls^<<`, with `backward[L_s] = |psi_{L_t}>`.
    pub backward: Vec<PureState>,
}

/// Forward sweep `|phi_{l+1}> = e^{-i H_l} |phi_l>`; returns `L_s + 1` states.
pub fn forward_sweep(
    params: &StudentParams,
    basis: &OperatorBasis,
    psi_initial: &PureState,
) -> Result<Vec<PureState>> {
    let mut states = Vec::with_capacity(params.layer_count() + 1);
    states.push(psi_initial.clone());
    for layer in 0..params.layer_count() {
        let h = student_hamiltonian(params.coeffs(layer), basis)?;
        let u = unitary_exp(&h)?;
        let next = states.last().unwrap().evolve(&u)?;
        states.push(next);
    }
    Ok(states)
}

/// Backward sweep `|phi_l> = e^{+i H_l} |phi_{l+1}>`; returns `L_s + 1`
/// states indexed `0 ..= L_s`, with the last equal to `psi_final`.
pub fn backward_sweep(
    params: &StudentParams,
    basis: &OperatorBasis,
    psi_final: &PureState,
) -> Result<Vec<PureState>> {
    let layers = params.layer_count();
    let mut states = vec![psi_final.clone(); layers + 1];
    for layer in (0..layers).rev() {
        let h = student_hamiltonian(params.coeffs(layer), basis)?;
        let u_inv = unitary_exp(&h.scale_re(-1.0))?;
        states[layer] = states[layer + 1].evolve(&u_inv)?;
    }
    Ok(states)
}

/// Both sweeps for the fixed boundary pair.
pub fn sweep_states(
    params: &StudentParams,
    basis: &OperatorBasis,
    psi_initial: &PureState,
    psi_final: &PureState,
) -> Result<SweepStates> {
    Ok(SweepStates {
        forward: forward_sweep(params, basis, psi_initial)?,
        backward: backward_sweep(params, basis, psi_final)?,
    })
}

/// Local consistency error at a layer:
/// `e_l = 1 - Re(f_l)` with `f_l = <phi_{l+1}^<| e^{-iH_l} |phi_l^>>`.
pub fn local_error(
    forward_l: &PureState,
    backward_next: &PureState,
    hamiltonian: &ComplexMatrix,
) -> Result<(f64, Complex64)> {
    let u = unitary_exp(hamiltonian)?;
    let propagated = forward_l.evolve(&u)?;
    let f = backward_next.inner(&propagated);
    Ok((1.0 - f.re, f))
}

/// Total training error `e = (1/2) <dphi|dphi>` between the target and the
/// forward endpoint.
pub fn total_error(forward_end: &PureState, target: &PureState) -> f64 {
    0.5 * forward_end
        .amplitudes()
        .iter()
        .zip(target.amplitudes().iter())
        .map(|(a, b)| (b - a).norm_sqr())
        .sum::<f64>()
}

// ---------------------------------------------------------------------------
// Single-qubit closed-form gradient
// ---------------------------------------------------------------------------

/// Scalars entering the single-qubit closed-form overlap and gradient:
/// `f_l = A cos(h) - i (B . h/h) sin(h)` with `h^2 = hx^2 + hy^2 + hz^2`.
#[derive(Debug, Clone, Copy)]
pub struct GradScratch1Q {
    pub a: Complex64,
    pub b: [Complex64; 3],
    pub h_vec: [f64; 3],
    pub h: f64,
}

impl GradScratch1Q {
    /// Assemble the scalars from the layer coefficients and the sweep pair.
    pub fn compute(
        theta: &[f64],
        forward_l: &PureState,
        backward_next: &PureState,
    ) -> Result<Self> {
        if theta.len() != 3 {
            return Err(Error::invalid(format!(
                "single-qubit layer needs 3 coefficients, got {}",
                theta.len()
            )));
        }
        if forward_l.dim() != 2 || backward_next.dim() != 2 {
            return Err(Error::dim("closed-form gradient needs d = 2".to_string()));
        }
        let alpha = forward_l.amplitudes();
        let beta = backward_next.amplitudes();
        let (ap, am) = (alpha[0], alpha[1]);
        let (bp, bm) = (beta[0].conj(), beta[1].conj());
        let a = ap * bp + am * bm;
        let bx = ap * bm + am * bp;
        let by = Complex64::new(0.0, 1.0) * (ap * bm - am * bp);
        let bz = ap * bp - am * bm;
        let h_vec = [theta[0], theta[1], theta[2]];
        let h = (h_vec[0] * h_vec[0] + h_vec[1] * h_vec[1] + h_vec[2] * h_vec[2]).sqrt();
        Ok(Self {
            a,
            b: [bx, by, bz],
            h_vec,
            h,
        })
    }

    /// The overlap `f_l` in closed form.
    pub fn overlap(&self) -> Complex64 {
        if self.h < 1e-300 {
            return self.a;
        }
        let (s, c) = self.h.sin_cos();
        let b_dot_n: Complex64 = (0..3)
            .map(|k| self.b[k] * (self.h_vec[k] / self.h))
            .sum();
        self.a * c - Complex64::new(0.0, 1.0) * b_dot_n * s
    }

    /// `e_l = 1 - Re(f_l)` in closed form.
    pub fn error(&self) -> f64 {
        1.0 - self.overlap().re
    }

    /// The corrected gradient `de_l/dh_mu`:
    /// `(h_mu/h) {[Re A + (n . Im B)/h] sin h - (n . Im B) cos h} - Im(B_mu) sin(h)/h`,
    /// with the analytic series limit below `h = 1e-12`.
    pub fn gradient(&self) -> [f64; 3] {
        let g = [self.b[0].im, self.b[1].im, self.b[2].im];
        let re_a = self.a.re;
        if self.h < 1e-12 {
            // series limit: de/dh_mu -> Re(A) h_mu - Im(B_mu) + O(h^2)
            return [
                re_a * self.h_vec[0] - g[0],
                re_a * self.h_vec[1] - g[1],
                re_a * self.h_vec[2] - g[2],
            ];
        }
        let (s, c) = self.h.sin_cos();
        let n = [
            self.h_vec[0] / self.h,
            self.h_vec[1] / self.h,
            self.h_vec[2] / self.h,
        ];
        let p = n[0] * g[0] + n[1] * g[1] + n[2] * g[2];
        let bracket = (re_a + p / self.h) * s - p * c;
        let sinc = s / self.h;
        [
            n[0] * bracket - g[0] * sinc,
            n[1] * bracket - g[1] * sinc,
            n[2] * bracket - g[2] * sinc,
        ]
    }
}

/// Closed-form `de_l/dh_mu` for the single-qubit 3-term basis.
pub fn grad_closed_form_1q(
    theta: &[f64],
    forward_l: &PureState,
    backward_next: &PureState,
) -> Result<[f64; 3]> {
    Ok(GradScratch1Q::compute(theta, forward_l, backward_next)?.gradient())
}

// ---------------------------------------------------------------------------
// Two-qubit Pauli-basis update direction
// ---------------------------------------------------------------------------

/// The Pauli-basis eigenstate update direction for the 16-term basis:
///
/// `D_{nu nu'} = sum_n sum_{mu mu'} Im(e^{-i E_n} <n| s_mu s_mu' s_nu s_nu' |n> <phi^<| s_mu s_mu' |phi^>>)`
///
/// The layer update is `Delta theta = eta * D`. The direction carries the
/// verbatim overall scale (d times the commuting-approximation descent
/// direction); pass `normalized = true` to divide by d for the
/// mathematically normalized variant.
pub fn grad_pauli_basis_2q(
    theta: &[f64],
    basis: &OperatorBasis,
    forward_l: &PureState,
    backward_next: &PureState,
    normalized: bool,
) -> Result<Vec<f64>> {
    if basis.kind() != BasisKind::TwoQubit16Term {
        return Err(Error::invalid(
            "Pauli-basis update rule needs the 16-term two-qubit basis".to_string(),
        ));
    }
    let h = student_hamiltonian(theta, basis)?;
    let eig = hermitian_eig(&h, crate::linalg::HERMITICITY_TOL)?;
    let d = basis.dim();
    let v = &eig.eigenvectors;
    let phases: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&e| Complex64::new(0.0, -e).exp())
        .collect();

    // w_a = <phi^<| B_a |phi^>>
    let fwd = forward_l.amplitudes();
    let bwd = backward_next.amplitudes();
    let weights: Vec<Complex64> = basis
        .operators()
        .iter()
        .map(|op| {
            let acted = op.matvec(fwd);
            bwd.iter()
                .zip(acted.iter())
                .map(|(b, x)| b.conj() * x)
                .sum()
        })
        .collect();

    let mut direction = vec![0.0; basis.len()];
    for (nu, b_nu) in basis.operators().iter().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (mu, b_mu) in basis.operators().iter().enumerate() {
            let prod = b_mu.matmul(b_nu);
            for n in 0..d {
                // <n| B_mu B_nu |n>
                let mut expect = Complex64::new(0.0, 0.0);
                for j in 0..d {
                    let mut row = Complex64::new(0.0, 0.0);
                    for k in 0..d {
                        row += prod[(j, k)] * v[(k, n)];
                    }
                    expect += v[(j, n)].conj() * row;
                }
                acc += phases[n] * expect * weights[mu];
            }
        }
        direction[nu] = acc.im;
    }
    if normalized {
        for g in &mut direction {
            *g /= d as f64;
        }
    }
    Ok(direction)
}

// ---------------------------------------------------------------------------
// Finite-difference oracle
// ---------------------------------------------------------------------------

/// Central finite differences of `e_l` per coefficient; the reference
/// gradient every closed form is checked against.
pub fn grad_finite_difference(
    theta: &[f64],
    basis: &OperatorBasis,
    forward_l: &PureState,
    backward_next: &PureState,
    fd_step: f64,
) -> Result<Vec<f64>> {
    if !(fd_step > 0.0) {
        return Err(Error::invalid("finite-difference step must be positive"));
    }
    let error_at = |coeffs: &[f64]| -> Result<f64> {
        let h = student_hamiltonian(coeffs, basis)?;
        Ok(local_error(forward_l, backward_next, &h)?.0)
    };
    let mut grad = vec![0.0; theta.len()];
    let mut probe = theta.to_vec();
    for k in 0..theta.len() {
        let orig = probe[k];
        probe[k] = orig + fd_step;
        let plus = error_at(&probe)?;
        probe[k] = orig - fd_step;
        let minus = error_at(&probe)?;
        probe[k] = orig;
        grad[k] = (plus - minus) / (2.0 * fd_step);
    }
    Ok(grad)
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

/// Outcome of a gradient-descent run.
#[derive(Debug, Clone)]
pub struct TrainResult {
    pub params: StudentParams,
    /// `e = (1/2) |dphi_{L_s}|^2` before each iteration, plus the final
    /// value after the last update (length `iterations + 1`).
    pub error_history: Vec<f64>,
    /// Error of the final parameters.
    pub final_error: f64,
}

/// Train a student of `layer_count` layers to map `psi_initial` to
/// `psi_target`, with fixed boundary conditions and synchronous per-layer
/// updates from frozen sweep states.
pub fn gd_train(
    psi_initial: &PureState,
    psi_target: &PureState,
    layer_count: usize,
    basis: &OperatorBasis,
    cfg: &LearnConfig,
) -> Result<TrainResult> {
    cfg.validate()?;
    if layer_count == 0 {
        return Err(Error::invalid("student needs at least one layer"));
    }
    if psi_initial.dim() != basis.dim() || psi_target.dim() != basis.dim() {
        return Err(Error::dim(format!(
            "state dim {} vs basis dim {}",
            psi_initial.dim(),
            basis.dim()
        )));
    }
    match (cfg.gradient_mode, basis.kind()) {
        (GradientMode::ClosedForm1Q, BasisKind::SingleQubit3Term) => {}
        (GradientMode::PauliBasis2Q, BasisKind::TwoQubit16Term) => {}
        (GradientMode::FiniteDifference, _) => {}
        (mode, kind) => {
            return Err(Error::invalid(format!(
                "gradient mode {mode:?} does not apply to basis {kind:?}"
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut params = StudentParams::random_uniform(
        layer_count,
        basis.len(),
        cfg.init_range.0,
        cfg.init_range.1,
        &mut rng,
    )?;
    let eta = cfg.learning_rate;
    let mut history = Vec::with_capacity(cfg.iterations + 1);

    let layer_update = |params: &StudentParams,
                        layer: usize,
                        forward_l: &PureState,
                        backward_next: &PureState|
     -> Result<Vec<f64>> {
        match cfg.gradient_mode {
            GradientMode::ClosedForm1Q => {
                let grad = grad_closed_form_1q(params.coeffs(layer), forward_l, backward_next)?;
                Ok(grad.iter().map(|g| -eta * g).collect())
            }
            GradientMode::PauliBasis2Q => {
                let dir = grad_pauli_basis_2q(
                    params.coeffs(layer),
                    basis,
                    forward_l,
                    backward_next,
                    false,
                )?;
                Ok(dir.iter().map(|d| eta * d).collect())
            }
            GradientMode::FiniteDifference => {
                let grad = grad_finite_difference(
                    params.coeffs(layer),
                    basis,
                    forward_l,
                    backward_next,
                    cfg.fd_step,
                )?;
                Ok(grad.iter().map(|g| -eta * g).collect())
            }
        }
    };

    for _iter in 0..cfg.iterations {
        match cfg.update_order {
            UpdateOrder::Synchronous => {
                let forward = forward_sweep(&params, basis, psi_initial)?;
                let backward = backward_sweep(&params, basis, psi_target)?;
                history.push(total_error(&forward[layer_count], psi_target));
                for layer in 0..layer_count {
                    let update =
                        layer_update(&params, layer, &forward[layer], &backward[layer + 1])?;
                    for (theta, delta) in params.coeffs_mut(layer).iter_mut().zip(update) {
                        *theta += delta;
                    }
                }
                params.clip();
            }
            UpdateOrder::Sequential => {
                // Backward states stay valid through the whole iteration:
                // backward[l+1] only involves layers >= l+1, which are still
                // untouched when layer l is updated. The forward state is
                // re-propagated through each freshly updated layer.
                let backward = backward_sweep(&params, basis, psi_target)?;
                let forward_end = forward_sweep(&params, basis, psi_initial)?
                    .pop()
                    .expect("sweep is never empty");
                history.push(total_error(&forward_end, psi_target));
                let mut phi = psi_initial.clone();
                for layer in 0..layer_count {
                    let update = layer_update(&params, layer, &phi, &backward[layer + 1])?;
                    for (theta, delta) in params.coeffs_mut(layer).iter_mut().zip(update) {
                        *theta += delta;
                    }
                    let bound = params.theta_max();
                    for theta in params.coeffs_mut(layer) {
                        *theta = theta.clamp(-bound, bound);
                    }
                    let h = student_hamiltonian(params.coeffs(layer), basis)?;
                    phi = phi.evolve(&unitary_exp(&h)?)?;
                }
            }
        }
    }

    let forward = forward_sweep(&params, basis, psi_initial)?;
    let final_error = total_error(&forward[layer_count], psi_target);
    history.push(final_error);

    Ok(TrainResult {
        params,
        error_history: history,
        final_error,
    })
}

// ---------------------------------------------------------------------------
// Noisy evaluation
// ---------------------------------------------------------------------------

/// Success probabilities of a trained student run under noise.
#[derive(Debug, Clone)]
pub struct StudentEvaluation {
    /// `P_success` after each layer, `l = 0 .. L_s - 1`.
    pub p_success: Vec<f64>,
}

impl StudentEvaluation {
    pub fn final_success(&self) -> f64 {
        *self.p_success.last().unwrap_or(&0.0)
    }
}

/// Evolve `rho_0 = |psi_i><psi_i|` through the trained layers under a noise
/// channel with per-layer strength `eps_l = eps / L_s`.
pub fn evaluate_student_noisy(
    params: &StudentParams,
    basis: &OperatorBasis,
    noise: NoiseKind,
    noise_strength: f64,
    noise_seed: u64,
    psi_initial: &PureState,
    psi_target: &PureState,
) -> Result<StudentEvaluation> {
    let layers = params.layer_count();
    if layers == 0 {
        return Err(Error::invalid("student needs at least one layer"));
    }
    let eps_l = noise_strength / layers as f64;
    if !(0.0..=1.0).contains(&eps_l) {
        return Err(Error::invalid(format!(
            "per-layer noise eps/L_s = {eps_l} must lie in [0, 1]"
        )));
    }
    let dim = basis.dim();
    let mut rho = psi_initial.density();
    let mut p_success = Vec::with_capacity(layers);
    for layer in 0..layers {
        let h = student_hamiltonian(params.coeffs(layer), basis)?;
        let u = unitary_exp(&h)?;
        let evolved = crate::qstate::apply_unitary(&rho, &u)?;
        let (channel, _) = build_layer_channel(noise, dim, eps_l, noise_seed, layer)?;
        rho = channel.apply(&evolved)?;
        p_success.push(success_probability(&rho, psi_target)?);
    }
    Ok(StudentEvaluation { p_success })
}
