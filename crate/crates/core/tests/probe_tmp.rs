use reinfanneal_core::student::*;
use reinfanneal_core::teacher::*;

#[test]
fn probe() {
    let p0 = 1.0 / 1024.0;
    let inst = SearchInstance::single_qubit(p0).unwrap();
    let layers = 50;
    let sched = grover_schedule(layers, p0).unwrap();
    let base = TeacherConfig {
        instance: inst.clone(), layer_count: layers, reinforcement: 0.0, lookahead: 0,
        noise_strength: 0.0, noise: NoiseKind::Depolarizing, lambda_floor: 1e-12, seed: 0,
    };

    println!("--- noise-free teacher target P vs r (lambda_floor=1e-12, dl=0):");
    for r in [0.0, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0] {
        let mut c = base.clone();
        c.reinforcement = r;
        let t = teacher_target(&c, &sched).unwrap();
        println!("  r={r}: P = {:.4}", inst.psi_target().inner(&t).norm_sqr());
    }
    println!("--- noisy teacher (depol eps=0.4) final P vs r:");
    for r in [-1.0, -0.5, -0.2, -0.1, -0.05, 0.0, 0.05, 0.1, 0.2, 0.5, 1.0] {
        let mut c = base.clone();
        c.reinforcement = r;
        c.noise_strength = 0.4;
        let tr = run_teacher(&c, &sched).unwrap();
        println!("  r={r}: P = {:.4}", tr.final_success());
    }
    println!("--- noisy teacher (bitflip eps=0.4) final P vs r:");
    for r in [-0.2, -0.1, 0.0, 0.1, 0.2, 0.5] {
        let mut c = base.clone();
        c.reinforcement = r;
        c.noise_strength = 0.4;
        c.noise = NoiseKind::BitFlip;
        let tr = run_teacher(&c, &sched).unwrap();
        println!("  r={r}: P = {:.4}", tr.final_success());
    }
    println!("--- noise-free teacher target P vs r at floor 1e-2:");
    for r in [0.0, 0.2, 0.5, 1.0] {
        let mut c = base.clone();
        c.reinforcement = r;
        c.lambda_floor = 1e-2;
        let t = teacher_target(&c, &sched).unwrap();
        println!("  r={r}: P = {:.4}", inst.psi_target().inner(&t).norm_sqr());
    }
}
