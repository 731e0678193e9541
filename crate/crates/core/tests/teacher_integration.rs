//! Integration tests for the teacher dynamics, including an independent
//! closed-form two-level oracle for the noise-free annealing run.

use num_complex::Complex64;
use reinfanneal_core::linalg::ComplexMatrix;
use reinfanneal_core::qstate::success_probability;
use reinfanneal_core::teacher::{
    grover_schedule, run_teacher, running_time_scale, NoiseKind, SearchInstance, TeacherConfig,
};

const P0: f64 = 1.0 / 1024.0;

/// Closed-form `e^{-iH}` for a 2x2 Hermitian matrix, via the Pauli
/// decomposition and the cos/sin rotation formula. Shares nothing with the
/// Jacobi eigensolver path.
fn closed_form_u(h: &ComplexMatrix) -> [[Complex64; 2]; 2] {
    let c0 = (h[(0, 0)].re + h[(1, 1)].re) / 2.0;
    let hz = (h[(0, 0)].re - h[(1, 1)].re) / 2.0;
    let hx = h[(0, 1)].re;
    let hy = -h[(0, 1)].im;
    let norm = (hx * hx + hy * hy + hz * hz).sqrt();
    let phase = Complex64::new(0.0, -c0).exp();
    if norm < 1e-300 {
        return [
            [phase, Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), phase],
        ];
    }
    let (s, c) = norm.sin_cos();
    let i = Complex64::new(0.0, 1.0);
    let (nx, ny, nz) = (hx / norm, hy / norm, hz / norm);
    let u00 = Complex64::new(c, 0.0) - i * nz * s;
    let u01 = (-i * nx - ny) * s;
    let u10 = (-i * nx + ny) * s;
    let u11 = Complex64::new(c, 0.0) + i * nz * s;
    [
        [phase * u00, phase * u01],
        [phase * u10, phase * u11],
    ]
}

#[test]
fn noise_free_run_matches_two_level_closed_form() {
    let layers = 50;
    let inst = SearchInstance::single_qubit(P0).unwrap();
    let sched = grover_schedule(layers, P0).unwrap();
    let cfg = TeacherConfig {
        instance: inst.clone(),
        layer_count: layers,
        reinforcement: 0.0,
        lookahead: 0,
        noise_strength: 0.0,
        noise: NoiseKind::Depolarizing,
        lambda_floor: 1e-12,
        seed: 0,
    };
    let trace = run_teacher(&cfg, &sched).unwrap();

    // oracle: pure-state evolution with the closed-form 2x2 unitary
    let mut psi = [
        Complex64::new(P0.sqrt(), 0.0),
        Complex64::new((1.0 - P0).sqrt(), 0.0),
    ];
    for (l, rec) in trace.records.iter().enumerate() {
        let h = inst.annealing_hamiltonian(sched.t(l));
        let u = closed_form_u(&h);
        psi = [
            u[0][0] * psi[0] + u[0][1] * psi[1],
            u[1][0] * psi[0] + u[1][1] * psi[1],
        ];
        let oracle_p = psi[0].norm_sqr();
        assert!(
            (rec.p_success - oracle_p).abs() <= 1e-10,
            "layer {l}: trace {} vs oracle {}",
            rec.p_success,
            oracle_p
        );
    }
}

#[test]
fn running_time_scale_matches_exhaustive_scan() {
    let layers = 50;
    let inst = SearchInstance::single_qubit(P0).unwrap();
    let sched = grover_schedule(layers, P0).unwrap();
    let cfg = TeacherConfig {
        instance: inst,
        layer_count: layers,
        reinforcement: 0.0,
        lookahead: 0,
        noise_strength: 0.0,
        noise: NoiseKind::Depolarizing,
        lambda_floor: 1e-12,
        seed: 0,
    };
    let trace = run_teacher(&cfg, &sched).unwrap();
    let scale = running_time_scale(&trace);

    // brute-force scan over every candidate layer
    let mut best_layer = None;
    let mut best_value = f64::INFINITY;
    for rec in &trace.records {
        if rec.layer == 0 || rec.p_success <= 0.0 {
            continue;
        }
        let value = rec.layer as f64 / rec.p_success;
        if value < best_value {
            best_value = value;
            best_layer = Some(rec.layer);
        }
    }
    assert_eq!(scale.best_layer, best_layer);
    assert_eq!(scale.values.len(), layers - 1);
}

#[test]
fn noise_free_dynamics_confined_to_two_level_subspace() {
    // the N-qubit search never leaves span{target, target-complement}
    let inst = SearchInstance::n_qubit(3).unwrap();
    let layers = 20;
    let sched = grover_schedule(layers, inst.p0()).unwrap();
    let cfg = TeacherConfig {
        instance: inst.clone(),
        layer_count: layers,
        reinforcement: 0.0,
        lookahead: 0,
        noise_strength: 0.0,
        noise: NoiseKind::Depolarizing,
        lambda_floor: 1e-12,
        seed: 0,
    };
    let trace = run_teacher(&cfg, &sched).unwrap();
    let complement = inst.target_complement();
    for rho in trace.states.as_ref().unwrap() {
        let weight = success_probability(rho, inst.psi_target()).unwrap()
            + success_probability(rho, &complement).unwrap();
        assert!(weight >= 1.0 - 1e-10, "subspace leakage: weight {weight}");
    }
}

#[test]
fn noisy_trace_states_satisfy_density_invariants() {
    for (noise, eps) in [
        (NoiseKind::Depolarizing, 0.8),
        (NoiseKind::BitFlip, 0.5),
        (NoiseKind::PauliRandom, 0.6),
    ] {
        let inst = SearchInstance::two_qubit(P0).unwrap();
        let layers = 15;
        let sched = grover_schedule(layers, P0).unwrap();
        let cfg = TeacherConfig {
            instance: inst,
            layer_count: layers,
            reinforcement: 0.7,
            lookahead: 1,
            noise_strength: eps,
            noise,
            lambda_floor: 1e-12,
            seed: 99,
        };
        let trace = run_teacher(&cfg, &sched).unwrap();
        for rho in trace.states.as_ref().unwrap() {
            rho.validate().unwrap();
        }
        for rec in &trace.records {
            assert!((0.0..=1.0).contains(&rec.p_success));
        }
    }
}

#[test]
fn reinforcement_with_noise_beats_plain_annealing_single_qubit() {
    // the qualitative claim behind the figure sweeps, at d = 2
    let layers = 50;
    let inst = SearchInstance::single_qubit(P0).unwrap();
    let sched = grover_schedule(layers, P0).unwrap();
    let run = |r: f64| {
        let cfg = TeacherConfig {
            instance: inst.clone(),
            layer_count: layers,
            reinforcement: r,
            lookahead: 0,
            noise_strength: 0.4,
            noise: NoiseKind::Depolarizing,
            lambda_floor: 1e-12,
            seed: 0,
        };
        run_teacher(&cfg, &sched).unwrap().final_success()
    };
    let baseline = run(0.0);
    let best = [0.2, 0.4, 0.6, 0.8, 1.0]
        .iter()
        .map(|&r| run(r))
        .fold(0.0, f64::max);
    assert!(
        best > baseline,
        "reinforced best {best} did not beat baseline {baseline}"
    );
}
