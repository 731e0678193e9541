//! Quantum state containers, success-probability metrics, and Kraus noise
//! channels.
//!
//! A noisy layer acts as `rho -> (1 - eps_l) U rho U† + eps_l sum_a K_a (U rho U†) K_a†`;
//! this module provides the two halves separately ([`apply_unitary`] and
//! [`apply_channel`]) so teacher, student, and lookahead share one unitary
//! path. Composition order is always unitary first, then noise.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, kron, pauli, ComplexMatrix, PauliLabel, HERMITICITY_TOL,
};

/// Numerical tolerance for the trace-1 and Hermiticity invariants of a
/// density matrix.
pub const DENSITY_TOL: f64 = 1e-10;

/// Allowed negativity of density-matrix eigenvalues (numerical PSD).
pub const PSD_TOL: f64 = 1e-9;

/// Tolerance on the Kraus completeness residual.
pub const COMPLETENESS_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Pure states
// ---------------------------------------------------------------------------

/// A unit-norm complex state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Wrap an amplitude vector; the norm must already be 1 to within 1e-12.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::invalid("state dimension must be >= 1"));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "state norm {norm} deviates from 1 by more than 1e-12"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Normalize an arbitrary nonzero amplitude vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::invalid("cannot normalize a zero vector"));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self { amplitudes })
    }

    /// The computational basis state `|index>`.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `U |self>`; unitarity of `U` is the caller's obligation.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<PureState> {
        if u.dim() != self.dim() {
            return Err(Error::dim(format!(
                "unitary dim {} vs state dim {}",
                u.dim(),
                self.dim()
            )));
        }
        Ok(PureState {
            amplitudes: u.matvec(&self.amplitudes),
        })
    }

    /// The projector `|self><self|` as a density matrix.
    pub fn density(&self) -> DensityMatrix {
        let d = self.dim();
        let m = ComplexMatrix::from_fn(d, |r, c| {
            self.amplitudes[r] * self.amplitudes[c].conj()
        });
        DensityMatrix::from_evolution(m)
    }
}

// ---------------------------------------------------------------------------
// Density matrices
// ---------------------------------------------------------------------------

/// A Hermitian, positive-semidefinite, trace-1 operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validating constructor: checks Hermiticity, unit trace, and numerical
    /// positive semidefiniteness (min eigenvalue >= -1e-9).
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let herm = matrix.hermiticity_residual();
        if herm > DENSITY_TOL {
            return Err(Error::invalid(format!(
                "density matrix not Hermitian: residual {herm:.3e}"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > DENSITY_TOL || trace.im.abs() > DENSITY_TOL {
            return Err(Error::invalid(format!(
                "density matrix trace {trace} deviates from 1"
            )));
        }
        let rho = Self { matrix };
        let min_eig = rho.min_eigenvalue()?;
        if min_eig < -PSD_TOL {
            return Err(Error::invalid(format!(
                "density matrix has eigenvalue {min_eig:.3e} below -{PSD_TOL:e}"
            )));
        }
        Ok(rho)
    }

    /// Trusted constructor for matrices produced by invariant-preserving
    /// evolution steps (unitary conjugation, valid channels, convex mixing).
    pub(crate) fn from_evolution(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.hermiticity_residual() <= 1e-8);
        debug_assert!((matrix.trace().re - 1.0).abs() <= 1e-8);
        Self { matrix }
    }

    /// The maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64),
        }
    }

    /// A seeded random full-rank mixed state (`A A† / Tr`), used by property
    /// tests and sensitivity sweeps.
    pub fn random_mixed(dim: usize, rng: &mut ChaCha8Rng) -> Self {
        let a = ComplexMatrix::from_fn(dim, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let aa = a.matmul(&a.dagger());
        let trace = aa.trace().re;
        Self {
            matrix: aa.scale_re(1.0 / trace),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Smallest eigenvalue (for PSD checks).
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let eig = hermitian_eig(&self.matrix, HERMITICITY_TOL.max(DENSITY_TOL))?;
        Ok(eig.eigenvalues[0])
    }

    /// Re-check all invariants; used by tests and long-run diagnostics.
    pub fn validate(&self) -> Result<()> {
        Self::new(self.matrix.clone()).map(|_| ())
    }
}

/// `U rho U†`.
pub fn apply_unitary(rho: &DensityMatrix, u: &ComplexMatrix) -> Result<DensityMatrix> {
    if u.dim() != rho.dim() {
        return Err(Error::dim(format!(
            "unitary dim {} vs state dim {}",
            u.dim(),
            rho.dim()
        )));
    }
    debug_assert!(u.unitarity_residual() <= 1e-8, "non-unitary conjugation");
    Ok(DensityMatrix::from_evolution(rho.matrix.conjugate_by(u)))
}

/// `Tr(rho |target><target|)`, clamped to [0, 1].
pub fn success_probability(rho: &DensityMatrix, target: &PureState) -> Result<f64> {
    if rho.dim() != target.dim() {
        return Err(Error::dim(format!(
            "state dim {} vs target dim {}",
            rho.dim(),
            target.dim()
        )));
    }
    let d = rho.dim();
    let amps = target.amplitudes();
    let mut value = Complex64::new(0.0, 0.0);
    for r in 0..d {
        for c in 0..d {
            value += amps[r].conj() * rho.matrix[(r, c)] * amps[c];
        }
    }
    debug_assert!(value.re > -1e-10 && value.re < 1.0 + 1e-10);
    Ok(value.re.clamp(0.0, 1.0))
}

// ---------------------------------------------------------------------------
// Kraus channels
// ---------------------------------------------------------------------------

/// Which channel family a [`KrausChannel`] was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Depolarizing,
    BitFlip1Q,
    BitFlip2Q,
    PauliRandom,
    Custom,
}

impl ChannelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChannelKind::Depolarizing => "depolarizing",
            ChannelKind::BitFlip1Q => "bitflip1q",
            ChannelKind::BitFlip2Q => "bitflip2q",
            ChannelKind::PauliRandom => "pauli_random",
            ChannelKind::Custom => "custom",
        }
    }
}

/// How the noise map is evaluated and how its Kraus set is generated.
#[derive(Debug, Clone)]
enum ChannelBody {
    /// Full depolarization `rho -> Tr(rho) I/d`, evaluated in closed form.
    /// The Kraus set (complete Pauli set scaled by 1/d) is materialized on
    /// demand for completeness checks.
    Depolarize,
    /// Explicit Kraus operators, applied as dense sandwiches.
    Explicit(Vec<ComplexMatrix>),
    /// Weight-one Pauli terms `sqrt(weight) sigma_label^site` on `nqubits`
    /// qubits, applied via index arithmetic instead of dense products.
    WeightOnePauli {
        nqubits: usize,
        terms: Vec<(f64, usize, PauliLabel)>,
    },
}

/// One noisy layer's environment map: a mixing weight `eps_l` plus an
/// ordered Kraus set satisfying `sum_a K_a K_a† = I`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    dim: usize,
    mix_weight: f64,
    kind: ChannelKind,
    body: ChannelBody,
}

/// Per-layer weight-one Pauli noise probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliNoiseSpec {
    pub n_qubits: usize,
    /// One `(p_x, p_y, p_z)` row per layer the spec describes.
    pub probs: Vec<[f64; 3]>,
}

impl PauliNoiseSpec {
    pub fn validate(&self) -> Result<()> {
        for (l, p) in self.probs.iter().enumerate() {
            let sum: f64 = p.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::invalid(format!(
                    "layer {l}: Pauli probabilities sum to {sum}, not 1"
                )));
            }
            if p.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
                return Err(Error::invalid(format!(
                    "layer {l}: Pauli probability outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eps) || !eps.is_finite() {
        return Err(Error::invalid(format!(
            "noise mixing weight must lie in [0, 1], got {eps}"
        )));
    }
    Ok(())
}

impl KrausChannel {
    /// Depolarizing channel `rho -> (1 - eps) rho + (eps/d) Tr(rho) I`.
    ///
    /// The executed noise path is the closed-form affine map; the explicit
    /// Kraus set exists for the completeness invariant.
    pub fn depolarizing(dim: usize, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        if dim < 1 {
            return Err(Error::invalid("channel dimension must be >= 1"));
        }
        Ok(Self {
            dim,
            mix_weight: eps,
            kind: ChannelKind::Depolarizing,
            body: ChannelBody::Depolarize,
        })
    }

    /// Bit-flip channel: `sigma_x rho sigma_x` for one qubit, or the
    /// three-term two-qubit form `(sigma_x rho sigma_x + sigma_x' rho sigma_x'
    /// + sigma_x sigma_x' rho sigma_x sigma_x') / 3`.
    pub fn bit_flip(nqubits: usize, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        match nqubits {
            1 => Ok(Self {
                dim: 2,
                mix_weight: eps,
                kind: ChannelKind::BitFlip1Q,
                body: ChannelBody::Explicit(vec![pauli(PauliLabel::X)]),
            }),
            2 => {
                let x = pauli(PauliLabel::X);
                let i = ComplexMatrix::identity(2);
                let w = 1.0 / 3.0_f64.sqrt();
                let ops = vec![
                    kron(&x, &i).scale_re(w),
                    kron(&i, &x).scale_re(w),
                    kron(&x, &x).scale_re(w),
                ];
                Ok(Self {
                    dim: 4,
                    mix_weight: eps,
                    kind: ChannelKind::BitFlip2Q,
                    body: ChannelBody::Explicit(ops),
                })
            }
            n => Err(Error::invalid(format!(
                "bit-flip channel supports 1 or 2 qubits, got {n}"
            ))),
        }
    }

    /// Weight-one Pauli channel with given per-axis probabilities:
    /// `K_{i,mu} = sqrt(p_mu / N) sigma_mu^i`.
    pub fn weight1_pauli_with_probs(
        nqubits: usize,
        eps: f64,
        probs: [f64; 3],
    ) -> Result<Self> {
        check_eps(eps)?;
        if nqubits < 1 {
            return Err(Error::invalid("need at least one qubit"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 || probs.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::invalid(format!(
                "Pauli probabilities {probs:?} must be in [0,1] and sum to 1"
            )));
        }
        let n = nqubits as f64;
        let mut terms = Vec::with_capacity(3 * nqubits);
        for site in 0..nqubits {
            for (k, label) in PauliLabel::XYZ.iter().enumerate() {
                terms.push((probs[k] / n, site, *label));
            }
        }
        Ok(Self {
            dim: 1 << nqubits,
            mix_weight: eps,
            kind: ChannelKind::PauliRandom,
            body: ChannelBody::WeightOnePauli { nqubits, terms },
        })
    }

    /// Weight-one Pauli channel with `(p_x, p_y, p_z)` drawn uniformly on the
    /// probability simplex (sorted-uniform spacings).
    pub fn random_weight1_pauli(
        nqubits: usize,
        eps: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<(Self, PauliNoiseSpec)> {
        let (u1, u2): (f64, f64) = (rng.gen(), rng.gen());
        let (lo, hi) = if u1 <= u2 { (u1, u2) } else { (u2, u1) };
        let probs = [lo, hi - lo, 1.0 - hi];
        let channel = Self::weight1_pauli_with_probs(nqubits, eps, probs)?;
        let spec = PauliNoiseSpec {
            n_qubits: nqubits,
            probs: vec![probs],
        };
        Ok((channel, spec))
    }

    /// Channel from caller-supplied Kraus operators; completeness is
    /// validated on construction.
    pub fn custom(dim: usize, eps: f64, kraus_ops: Vec<ComplexMatrix>) -> Result<Self> {
        check_eps(eps)?;
        if kraus_ops.is_empty() {
            return Err(Error::invalid("custom channel needs at least one Kraus operator"));
        }
        if kraus_ops.iter().any(|k| k.dim() != dim) {
            return Err(Error::dim("Kraus operator dimension mismatch".to_string()));
        }
        let ch = Self {
            dim,
            mix_weight: eps,
            kind: ChannelKind::Custom,
            body: ChannelBody::Explicit(kraus_ops),
        };
        let residual = ch.completeness_residual();
        if residual > COMPLETENESS_TOL {
            return Err(Error::invalid(format!(
                "Kraus completeness residual {residual:.3e} exceeds {COMPLETENESS_TOL:e}"
            )));
        }
        Ok(ch)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The layer mixing weight `eps_l`.
    pub fn mix_weight(&self) -> f64 {
        self.mix_weight
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    /// The ordered Kraus operators, materialized as dense matrices.
    pub fn kraus_operators(&self) -> Vec<ComplexMatrix> {
        match &self.body {
            ChannelBody::Explicit(ops) => ops.clone(),
            ChannelBody::WeightOnePauli { nqubits, terms } => terms
                .iter()
                .map(|&(w, site, label)| {
                    crate::linalg::pauli_on_qubit(label, site, *nqubits)
                        .expect("sites validated at construction")
                        .scale_re(w.sqrt())
                })
                .collect(),
            ChannelBody::Depolarize => depolarizing_kraus_set(self.dim),
        }
    }

    /// `max(|sum K K† - I|, |sum K† K - I|)`; both orderings coincide for
    /// every built-in channel, and both are asserted.
    pub fn completeness_residual(&self) -> f64 {
        let ops = self.kraus_operators();
        let d = self.dim;
        let mut kkd = ComplexMatrix::zeros(d);
        let mut kdk = ComplexMatrix::zeros(d);
        for k in &ops {
            kkd = &kkd + &k.matmul(&k.dagger());
            kdk = &kdk + &k.dagger().matmul(k);
        }
        let id = ComplexMatrix::identity(d);
        kkd.max_abs_diff(&id).max(kdk.max_abs_diff(&id))
    }

    /// The bare noise map `sum_a K_a M K_a†` on a raw matrix.
    pub fn noise_map(&self, m: &ComplexMatrix) -> ComplexMatrix {
        match &self.body {
            ChannelBody::Depolarize => {
                let trace = m.trace();
                ComplexMatrix::identity(self.dim).scale(trace / self.dim as f64)
            }
            ChannelBody::Explicit(ops) => {
                let mut out = ComplexMatrix::zeros(self.dim);
                for k in ops {
                    out = &out + &k.matmul(m).matmul(&k.dagger());
                }
                out
            }
            ChannelBody::WeightOnePauli { nqubits, terms } => {
                let mut out = ComplexMatrix::zeros(self.dim);
                for &(w, site, label) in terms {
                    let conj = conjugate_weight1(m, site, label, *nqubits);
                    out = &out + &conj.scale_re(w);
                }
                out
            }
        }
    }

    /// One noisy layer (noise part only):
    /// `rho -> (1 - eps_l) rho + eps_l sum_a K_a rho K_a†`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::dim(format!(
                "channel dim {} vs state dim {}",
                self.dim,
                rho.dim()
            )));
        }
        if self.mix_weight == 0.0 {
            return Ok(rho.clone());
        }
        let noisy = self.noise_map(rho.matrix());
        let mixed = &rho.matrix().scale_re(1.0 - self.mix_weight)
            + &noisy.scale_re(self.mix_weight);
        Ok(DensityMatrix::from_evolution(mixed))
    }
}

/// Free-function form of [`KrausChannel::apply`].
pub fn apply_channel(rho: &DensityMatrix, channel: &KrausChannel) -> Result<DensityMatrix> {
    channel.apply(rho)
}

/// `sigma_label^site M sigma_label^site` via index arithmetic; O(d^2).
fn conjugate_weight1(
    m: &ComplexMatrix,
    site: usize,
    label: PauliLabel,
    nqubits: usize,
) -> ComplexMatrix {
    let d = m.dim();
    debug_assert_eq!(d, 1 << nqubits);
    // site 0 is the leftmost Kronecker factor, i.e. the most significant bit
    let mask = 1usize << (nqubits - 1 - site);
    match label {
        PauliLabel::I => m.clone(),
        PauliLabel::X => ComplexMatrix::from_fn(d, |r, c| m[(r ^ mask, c ^ mask)]),
        PauliLabel::Y => ComplexMatrix::from_fn(d, |r, c| {
            let sign = if (r & mask) == (c & mask) { 1.0 } else { -1.0 };
            m[(r ^ mask, c ^ mask)] * sign
        }),
        PauliLabel::Z => ComplexMatrix::from_fn(d, |r, c| {
            let sign = if (r & mask) == (c & mask) { 1.0 } else { -1.0 };
            m[(r, c)] * sign
        }),
    }
}

/// The complete Pauli (or generalized shift/clock) Kraus set realizing full
/// depolarization at dimension `d`.
fn depolarizing_kraus_set(d: usize) -> Vec<ComplexMatrix> {
    let scale = 1.0 / d as f64;
    if d.is_power_of_two() && d >= 2 {
        let nqubits = d.trailing_zeros() as usize;
        let mut ops = Vec::with_capacity(d * d);
        let mut stack: Vec<ComplexMatrix> = vec![ComplexMatrix::identity(1)];
        for _ in 0..nqubits {
            let mut next = Vec::with_capacity(stack.len() * 4);
            for base in &stack {
                for label in PauliLabel::ALL {
                    next.push(kron(base, &pauli(label)));
                }
            }
            stack = next;
        }
        for p in stack {
            ops.push(p.scale_re(scale));
        }
        ops
    } else {
        // shift/clock Weyl operators X^a Z^b for non-power-of-two dimensions
        let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / d as f64);
        let mut ops = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                let mut k = ComplexMatrix::zeros(d);
                for col in 0..d {
                    k[((col + a) % d, col)] = omega.powu(((b * col) % d) as u32) * scale;
                }
                ops.push(k);
            }
        }
        ops
    }
}
