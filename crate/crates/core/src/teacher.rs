//! The reinforced annealing teacher.
//!
//! A teacher run evolves `rho_{l+1} = (1-eps_l) U rho_l U† + eps_l sum_a K_a (U rho_l U†) K_a†`
//! over `L_t` layers, where `U = e^{-i H_l(r)}` and the layer Hamiltonian
//! `H_l(r) = (1-t_l) H_i + t_l H_f + r (-ln rho_{l+dl}(0))` is reinforced by
//! the negative log of a noise-free lookahead state.

use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{neg_log_density_matrix, unitary_exp, ComplexMatrix};
use crate::qstate::{
    apply_unitary, success_probability, DensityMatrix, KrausChannel, PauliNoiseSpec, PureState,
};
use crate::seeding::derive_seed;

/// Density matrices are retained in full along the trace only up to this
/// dimension; larger runs keep scalar observables per layer.
pub const STATE_RETENTION_MAX_DIM: usize = 16;

// ---------------------------------------------------------------------------
// Search instances
// ---------------------------------------------------------------------------

/// Which search geometry an instance was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    /// The effective two-level system of the search problem (d = 2).
    SingleQubit,
    /// The four-state two-qubit search (d = 4).
    TwoQubit,
    /// N qubits with a uniform-superposition start (d = 2^N, P0 = 2^-N).
    NQubit(usize),
}

/// A quantum search problem posed as annealing from the ground state of
/// `H_i = I - |psi_i><psi_i|` to the ground state of `H_f = I - |psi_f><psi_f|`.
#[derive(Debug, Clone)]
pub struct SearchInstance {
    kind: InstanceKind,
    psi_initial: PureState,
    psi_target: PureState,
    p0: f64,
    h_initial: ComplexMatrix,
    h_final: ComplexMatrix,
}

impl SearchInstance {
    /// The effective two-level instance: `|psi_i> = sqrt(P0)|+> + sqrt(1-P0)|->`,
    /// target `|+>` (basis index 0).
    pub fn single_qubit(p0: f64) -> Result<Self> {
        check_p0(p0)?;
        let amps = vec![
            Complex64::new(p0.sqrt(), 0.0),
            Complex64::new((1.0 - p0).sqrt(), 0.0),
        ];
        Self::from_parts(InstanceKind::SingleQubit, amps, 0, p0)
    }

    /// The two-qubit instance with amplitude `sqrt((1-P0)/3)` on each of the
    /// three non-target basis states and target `|++>`.
    pub fn two_qubit(p0: f64) -> Result<Self> {
        check_p0(p0)?;
        let rest = ((1.0 - p0) / 3.0).sqrt();
        let amps = vec![
            Complex64::new(p0.sqrt(), 0.0),
            Complex64::new(rest, 0.0),
            Complex64::new(rest, 0.0),
            Complex64::new(rest, 0.0),
        ];
        Self::from_parts(InstanceKind::TwoQubit, amps, 0, p0)
    }

    /// The N-qubit instance: uniform superposition start, target `|+>^(xN)`;
    /// the initial overlap is forced to `P0 = 2^-N`.
    pub fn n_qubit(n: usize) -> Result<Self> {
        if n == 0 || n > 20 {
            return Err(Error::invalid(format!("qubit count {n} out of range 1..=20")));
        }
        let dim = 1usize << n;
        let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        let amps = vec![amp; dim];
        let p0 = 1.0 / dim as f64;
        Self::from_parts(InstanceKind::NQubit(n), amps, 0, p0)
    }

    fn from_parts(
        kind: InstanceKind,
        amplitudes: Vec<Complex64>,
        target_index: usize,
        p0: f64,
    ) -> Result<Self> {
        let psi_initial = PureState::new(amplitudes)?;
        let dim = psi_initial.dim();
        let psi_target = PureState::basis_state(dim, target_index);
        let h_initial = projector_complement(&psi_initial);
        let h_final = projector_complement(&psi_target);
        Ok(Self {
            kind,
            psi_initial,
            psi_target,
            p0,
            h_initial,
            h_final,
        })
    }

    pub fn kind(&self) -> InstanceKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.psi_initial.dim()
    }

    /// Number of qubits when the dimension is a power of two.
    pub fn n_qubits(&self) -> usize {
        match self.kind {
            InstanceKind::SingleQubit => 1,
            InstanceKind::TwoQubit => 2,
            InstanceKind::NQubit(n) => n,
        }
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn psi_initial(&self) -> &PureState {
        &self.psi_initial
    }

    pub fn psi_target(&self) -> &PureState {
        &self.psi_target
    }

    pub fn h_initial(&self) -> &ComplexMatrix {
        &self.h_initial
    }

    pub fn h_final(&self) -> &ComplexMatrix {
        &self.h_final
    }

    /// The plain annealing Hamiltonian `(1-t) H_i + t H_f`.
    pub fn annealing_hamiltonian(&self, t: f64) -> ComplexMatrix {
        &self.h_initial.scale_re(1.0 - t) + &self.h_final.scale_re(t)
    }

    /// The normalized component of `|psi_i>` orthogonal to the target; the
    /// noise-free dynamics stays inside span{target, this}.
    pub fn target_complement(&self) -> PureState {
        let overlap = self.psi_target.inner(&self.psi_initial);
        let amps: Vec<Complex64> = self
            .psi_initial
            .amplitudes()
            .iter()
            .zip(self.psi_target.amplitudes().iter())
            .map(|(a, t)| a - overlap * t)
            .collect();
        PureState::normalized(amps).expect("initial and target states are never parallel")
    }
}

fn check_p0(p0: f64) -> Result<()> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::invalid(format!("P0 must lie in (0, 1), got {p0}")));
    }
    Ok(())
}

fn projector_complement(state: &PureState) -> ComplexMatrix {
    let d = state.dim();
    let amps = state.amplitudes();
    ComplexMatrix::from_fn(d, |r, c| {
        let delta = if r == c {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        delta - amps[r] * amps[c].conj()
    })
}

// ---------------------------------------------------------------------------
// Annealing schedules
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    GroverOptimal,
    Linear,
}

/// The evolution-time sequence `t_l in [0, 1]` for `L_t` layers.
#[derive(Debug, Clone)]
pub struct AnnealSchedule {
    kind: ScheduleKind,
    p0: f64,
    alpha: f64,
    values: Vec<f64>,
}

impl AnnealSchedule {
    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn layer_count(&self) -> usize {
        self.values.len()
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    /// The rotation half-angle `alpha = arctan(sqrt((1-P0)/P0))`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn t(&self, layer: usize) -> f64 {
        self.values[layer]
    }

    /// The uniform schedule `t_l = l / (L_t - 1)`.
    pub fn linear(layer_count: usize, p0: f64) -> Result<Self> {
        check_p0(p0)?;
        if layer_count < 2 {
            return Err(Error::invalid("schedule needs at least 2 layers"));
        }
        let den = (layer_count - 1) as f64;
        Ok(Self {
            kind: ScheduleKind::Linear,
            p0,
            alpha: ((1.0 - p0) / p0).sqrt().atan(),
            values: (0..layer_count).map(|l| l as f64 / den).collect(),
        })
    }
}

/// The Grover-optimal schedule
/// `t_l = (1/2) [1 - sqrt(P0/(1-P0)) tan((1 - 2l/(L_t-1)) alpha)]`.
pub fn grover_schedule(layer_count: usize, p0: f64) -> Result<AnnealSchedule> {
    check_p0(p0)?;
    if layer_count < 2 {
        return Err(Error::invalid("schedule needs at least 2 layers"));
    }
    let alpha = ((1.0 - p0) / p0).sqrt().atan();
    let coeff = (p0 / (1.0 - p0)).sqrt();
    let den = (layer_count - 1) as f64;
    let values = (0..layer_count)
        .map(|l| 0.5 * (1.0 - coeff * ((1.0 - 2.0 * l as f64 / den) * alpha).tan()))
        .collect();
    Ok(AnnealSchedule {
        kind: ScheduleKind::GroverOptimal,
        p0,
        alpha,
        values,
    })
}

// ---------------------------------------------------------------------------
// Teacher configuration and traces
// ---------------------------------------------------------------------------

/// Noise families a run can be configured with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    Depolarizing,
    BitFlip,
    PauliRandom,
}

impl NoiseKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            NoiseKind::Depolarizing => "depolarizing",
            NoiseKind::BitFlip => "bitflip",
            NoiseKind::PauliRandom => "pauli_random",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "depolarizing" => Ok(NoiseKind::Depolarizing),
            "bitflip" => Ok(NoiseKind::BitFlip),
            "pauli_random" => Ok(NoiseKind::PauliRandom),
            other => Err(Error::invalid(format!(
                "unknown noise kind {other:?}; expected depolarizing, bitflip, or pauli_random"
            ))),
        }
    }
}

/// Full description of one teacher run.
#[derive(Debug, Clone)]
pub struct TeacherConfig {
    pub instance: SearchInstance,
    /// Layer count `L_t`.
    pub layer_count: usize,
    /// Reinforcement strength `r`, uniform over layers.
    pub reinforcement: f64,
    /// Lookahead depth `delta_l >= 0`.
    pub lookahead: usize,
    /// Total noise strength `eps`; each layer mixes with `eps_l = eps / L_t`.
    pub noise_strength: f64,
    pub noise: NoiseKind,
    /// Eigenvalue clamp for `-ln rho`.
    pub lambda_floor: f64,
    /// Seed for per-layer channel draws (pauli_random only).
    pub seed: u64,
}

impl TeacherConfig {
    pub fn eps_per_layer(&self) -> f64 {
        self.noise_strength / self.layer_count as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.layer_count < 2 {
            return Err(Error::invalid("teacher needs at least 2 layers"));
        }
        let eps_l = self.eps_per_layer();
        if !(0.0..=1.0).contains(&eps_l) {
            return Err(Error::invalid(format!(
                "per-layer noise eps/L_t = {eps_l} must lie in [0, 1]"
            )));
        }
        if !(self.lambda_floor > 0.0 && self.lambda_floor < 1.0) {
            return Err(Error::invalid(format!(
                "lambda_floor must lie in (0, 1), got {:e}",
                self.lambda_floor
            )));
        }
        Ok(())
    }
}

/// One layer's observables along a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerRecord {
    /// Layer index `l`.
    pub layer: usize,
    /// Schedule value `t_l` of the layer that was applied.
    pub t: f64,
    /// Success probability of the state after this layer, `Tr(rho_{l+1} P_f)`.
    pub p_success: f64,
}

/// Per-layer observables plus the final state of one teacher run.
#[derive(Debug, Clone)]
pub struct TeacherTrace {
    pub records: Vec<LayerRecord>,
    pub final_state: DensityMatrix,
    /// Per-layer Pauli probabilities, present for pauli_random noise.
    pub noise_log: Option<PauliNoiseSpec>,
    /// Full states `rho_0 ... rho_{L_t}`, retained only for small dimensions.
    pub states: Option<Vec<DensityMatrix>>,
}

impl TeacherTrace {
    /// Success probability at the end of the run.
    pub fn final_success(&self) -> f64 {
        self.records.last().map(|r| r.p_success).unwrap_or(0.0)
    }
}

// ---------------------------------------------------------------------------
// Evolution operations
// ---------------------------------------------------------------------------

/// Build the channel a given layer sees. For `pauli_random` the per-layer
/// probabilities are drawn from a generator seeded by (seed, layer), so a
/// layer's channel never depends on execution order.
pub fn build_layer_channel(
    kind: NoiseKind,
    dim: usize,
    eps_l: f64,
    seed: u64,
    layer: usize,
) -> Result<(KrausChannel, Option<PauliNoiseSpec>)> {
    match kind {
        NoiseKind::Depolarizing => Ok((KrausChannel::depolarizing(dim, eps_l)?, None)),
        NoiseKind::BitFlip => {
            let nqubits = match dim {
                2 => 1,
                4 => 2,
                d => {
                    return Err(Error::invalid(format!(
                        "bit-flip noise is defined for d in {{2, 4}}, got d = {d}"
                    )))
                }
            };
            Ok((KrausChannel::bit_flip(nqubits, eps_l)?, None))
        }
        NoiseKind::PauliRandom => {
            if !dim.is_power_of_two() || dim < 2 {
                return Err(Error::invalid(format!(
                    "weight-one Pauli noise needs a 2^N dimension, got d = {dim}"
                )));
            }
            let nqubits = dim.trailing_zeros() as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[layer as u64]));
            let (ch, spec) = KrausChannel::random_weight1_pauli(nqubits, eps_l, &mut rng)?;
            Ok((ch, Some(spec)))
        }
    }
}

/// Roll `rho_l` forward by `lookahead` noise-free, reinforcement-free
/// unitary layers `e^{-i[(1-t_k) H_i + t_k H_f]}`, clamping the schedule
/// index at the final layer.
pub fn lookahead_rollout(
    rho: &DensityMatrix,
    layer: usize,
    lookahead: usize,
    sched: &AnnealSchedule,
    inst: &SearchInstance,
) -> Result<DensityMatrix> {
    let last = sched.layer_count() - 1;
    if layer > last {
        return Err(Error::invalid(format!(
            "layer {layer} out of range for {} schedule layers",
            sched.layer_count()
        )));
    }
    let mut out = rho.clone();
    for k in layer..layer + lookahead {
        let t = sched.t(k.min(last));
        let u = unitary_exp(&inst.annealing_hamiltonian(t))?;
        out = apply_unitary(&out, &u)?;
    }
    Ok(out)
}

/// The reinforced layer Hamiltonian
/// `H_l(r) = (1-t_l) H_i + t_l H_f + r (-ln rho_{l+dl}(0))`.
///
/// With `r = 0` this is exactly the plain annealing Hamiltonian; the
/// lookahead and logarithm are not evaluated at all.
pub fn reinforced_hamiltonian(
    layer: usize,
    rho: &DensityMatrix,
    cfg: &TeacherConfig,
    sched: &AnnealSchedule,
) -> Result<ComplexMatrix> {
    if layer >= sched.layer_count() {
        return Err(Error::invalid(format!(
            "layer {layer} out of range for {} schedule layers",
            sched.layer_count()
        )));
    }
    let plain = cfg.instance.annealing_hamiltonian(sched.t(layer));
    if cfg.reinforcement == 0.0 {
        return Ok(plain);
    }
    let look = lookahead_rollout(rho, layer, cfg.lookahead, sched, &cfg.instance)?;
    let reinforcing = neg_log_density_matrix(look.matrix(), cfg.lambda_floor)?;
    Ok(&plain + &reinforcing.scale_re(cfg.reinforcement))
}

/// One noisy reinforced layer: unitary conjugation, then the channel mix.
pub fn teacher_step(
    rho: &DensityMatrix,
    layer: usize,
    cfg: &TeacherConfig,
    sched: &AnnealSchedule,
    channel: &KrausChannel,
) -> Result<DensityMatrix> {
    let h = reinforced_hamiltonian(layer, rho, cfg, sched)?;
    let u = unitary_exp(&h)?;
    let evolved = apply_unitary(rho, &u)?;
    channel.apply(&evolved)
}

/// Run the full teacher dynamics from `rho_0 = |psi_i><psi_i|`, recording
/// the success probability after every layer. Deterministic given the
/// config (including its seed).
pub fn run_teacher(cfg: &TeacherConfig, sched: &AnnealSchedule) -> Result<TeacherTrace> {
    cfg.validate()?;
    if sched.layer_count() != cfg.layer_count {
        return Err(Error::invalid(format!(
            "schedule has {} layers but config says {}",
            sched.layer_count(),
            cfg.layer_count
        )));
    }
    let inst = &cfg.instance;
    let eps_l = cfg.eps_per_layer();
    let retain = inst.dim() <= STATE_RETENTION_MAX_DIM;

    let mut rho = inst.psi_initial().density();
    let mut records = Vec::with_capacity(cfg.layer_count);
    let mut states = retain.then(|| vec![rho.clone()]);
    let mut noise_rows: Vec<[f64; 3]> = Vec::new();

    for layer in 0..cfg.layer_count {
        let (channel, drawn) =
            build_layer_channel(cfg.noise, inst.dim(), eps_l, cfg.seed, layer)?;
        if let Some(spec) = drawn {
            noise_rows.extend_from_slice(&spec.probs);
        }
        rho = teacher_step(&rho, layer, cfg, sched, &channel)?;
        records.push(LayerRecord {
            layer,
            t: sched.t(layer),
            p_success: success_probability(&rho, inst.psi_target())?,
        });
        if let Some(list) = states.as_mut() {
            list.push(rho.clone());
        }
    }

    let noise_log = (!noise_rows.is_empty()).then(|| PauliNoiseSpec {
        n_qubits: inst.n_qubits(),
        probs: noise_rows,
    });

    Ok(TeacherTrace {
        records,
        final_state: rho,
        noise_log,
        states,
    })
}

// ---------------------------------------------------------------------------
// Running-time analysis
// ---------------------------------------------------------------------------

/// The per-layer running-time scale `l / P_success(l)` and its minimizer.
#[derive(Debug, Clone)]
pub struct RunningTimeScale {
    /// `(l, l / P_success(l))` for `l = 1 ... L_t - 1`; infinite where the
    /// success probability is zero.
    pub values: Vec<(usize, f64)>,
    /// The argmin `l*`, ties broken toward smaller `l`; `None` when every
    /// scale value is infinite.
    pub best_layer: Option<usize>,
}

/// Compute `l / P_success(l)` over `l = 1 ... L_t - 1` (the trivial `l = 0`
/// point is excluded) and its argmin.
pub fn running_time_scale(trace: &TeacherTrace) -> RunningTimeScale {
    let mut values = Vec::new();
    let mut best: Option<(usize, f64)> = None;
    for rec in trace.records.iter().skip(1) {
        let scale = if rec.p_success > 0.0 {
            rec.layer as f64 / rec.p_success
        } else {
            f64::INFINITY
        };
        values.push((rec.layer, scale));
        if scale.is_finite() && best.map_or(true, |(_, b)| scale < b) {
            best = Some((rec.layer, scale));
        }
    }
    RunningTimeScale {
        values,
        best_layer: best.map(|(l, _)| l),
    }
}
