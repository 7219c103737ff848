//! Checks shared by the property tests and the acceptance run.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use swg_core::mms::{ExactSolution, Mms};
use swg_core::{MeshFamily, Projector, RkTableau, ShallowWaterSolver, SplineSpace};

pub fn space(family: MeshFamily, n: usize, r: usize, mu: usize, zero_bc: bool) -> SplineSpace {
    SplineSpace::new(family.build(n).unwrap(), r, mu, zero_bc).unwrap()
}

/// `max |sum_i B_i(x) - 1|` over `xs` in the unrestricted space.
pub fn partition_of_unity_defect(space: &SplineSpace, xs: &[f64]) -> f64 {
    xs.iter()
        .map(|&x| {
            let (_, vals) = space.eval_basis(x, 0).unwrap();
            (vals.iter().sum::<f64>() - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// `max_i |c_i(P P f) - c_i(P f)|`.
pub fn idempotence_defect(space: SplineSpace, f: impl Fn(f64) -> f64) -> f64 {
    let p = Projector::new(space, None).unwrap();
    let once = p.project(f, &[]).unwrap();
    let twice = p.project(|x| once.eval(x, 0).unwrap(), &[]).unwrap();
    once.coeffs()
        .iter()
        .zip(twice.coeffs())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// `max_i |(f - P f, B_i)|`, computed as `b - M c`.
pub fn orthogonality_residual(space: SplineSpace, f: impl Fn(f64) -> f64 + Copy) -> f64 {
    let p = Projector::new(space, None).unwrap();
    let c = p.project(f, &[]).unwrap();
    let b = p.load_vector(f, &[]).unwrap();
    let mc = p.mass().matvec(c.coeffs());
    b.iter()
        .zip(&mc)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Relative gap between one RK4 step on `y' = z y` and `R(z) = sum z^j / j!`.
pub fn rk4_stability_defect(z: f64) -> f64 {
    let step = RkTableau::CLASSICAL
        .step(0.0, &[1.0], 1.0, |_, y| Ok(vec![z * y[0]]))
        .unwrap()[0];
    let exact = 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0;
    (step - exact).abs() / exact.abs().max(1.0)
}

/// `(U(0), U(1))` after `steps` forced steps on the given mesh.
pub fn boundary_velocity(
    family: MeshFamily,
    n: usize,
    r: usize,
    mu: usize,
    steps: usize,
) -> (f64, f64) {
    let solver = ShallowWaterSolver::new(family.build(n).unwrap(), r, mu, None).unwrap();
    let state = swg_core::studies::run_mms(&solver, Mms::One, 0.02 * steps as f64, steps).unwrap();
    (
        state.vel.eval(0.0, 0).unwrap(),
        state.vel.eval(1.0, 0).unwrap(),
    )
}

/// Largest coefficient change after `steps` unforced steps from `eta = level`,
/// `u = 0`.
pub fn rest_state_drift(level: f64, n: usize, steps: usize) -> f64 {
    let solver = ShallowWaterSolver::new(MeshFamily::QuasiA.build(n).unwrap(), 4, 2, None).unwrap();
    let start = solver.initial_state(|_| level, |_| 0.0).unwrap();
    let end = solver.evolve(&start, 0.01, steps, None).unwrap();
    let de = start
        .eta
        .coeffs()
        .iter()
        .zip(end.eta.coeffs())
        .map(|(a, b)| (a - b).abs());
    let du = end.vel.coeffs().iter().map(|c| c.abs());
    de.chain(du).fold(0.0, f64::max)
}

/// Largest gap between the closed-form forcing and the same expression built
/// from centered differences of `eta` and `u`, over `count` seeded random
/// points of `[0, 1] x [0, 1]`.
pub fn forcing_fd_defect(mms: Mms, count: usize, seed: u64) -> f64 {
    let d = 1e-5;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let x: f64 = rng.gen_range(d..1.0 - d);
        let t: f64 = rng.gen_range(d..1.0 - d);
        let eta = mms.eta(x, t);
        let u = mms.u(x, t);
        let eta_x = (mms.eta(x + d, t) - mms.eta(x - d, t)) / (2.0 * d);
        let eta_t = (mms.eta(x, t + d) - mms.eta(x, t - d)) / (2.0 * d);
        let u_x = (mms.u(x + d, t) - mms.u(x - d, t)) / (2.0 * d);
        let u_t = (mms.u(x, t + d) - mms.u(x, t - d)) / (2.0 * d);
        let g_eta = eta_t + u_x + eta_x * u + eta * u_x;
        let g_u = u_t + eta_x + u * u_x;
        worst = worst
            .max((g_eta - mms.forcing_eta(x, t)).abs())
            .max((g_u - mms.forcing_u(x, t)).abs());
    }
    worst
}

/// Evenly spaced points including both ends.
pub fn grid(count: usize) -> Vec<f64> {
    (0..count).map(|i| i as f64 / (count - 1) as f64).collect()
}
