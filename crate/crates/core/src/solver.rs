//! Fully discrete standard Galerkin / classical RK4 scheme.
//!
//! With `P` and `P0` the L2 projections onto `S_h` and `S_{h,0}`, the
//! semidiscrete system is
//!
//! ```text
//!   H_t = -P [Phi_x] + P g_eta,    Phi = U + H U
//!   U_t = -P0 [F]    + P0 g_u,     F   = H_x + U U_x
//! ```
//!
//! and each time step applies the classical four-stage RK4 scheme to it.
//! Stage `j` uses the forcing at `t + c_j k`.

use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::mesh::Mesh;
use crate::mms::ExactSolution;
use crate::projection::{ProjectedFunction, Projector};
use crate::spline::SplineSpace;

/// Coefficients above this magnitude are treated as a blow-up.
pub const BLOW_UP_THRESHOLD: f64 = 1e10;

/// Explicit four-stage Runge–Kutta tableau in the form
/// `Y_j = Y^n + k a_j K_j`, `K_{j+1} = f(t + c_j k, Y_j)`,
/// `Y^{n+1} = Y^n + k sum_j b_j K_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RkTableau {
    pub a: [f64; 3],
    pub b: [f64; 4],
    pub c: [f64; 4],
}

impl RkTableau {
    pub const CLASSICAL: RkTableau = RkTableau {
        a: [0.5, 0.5, 1.0],
        b: [1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
        c: [0.0, 0.5, 0.5, 1.0],
    };

    /// One step of size `k` for `y' = f(t, y)`.
    pub fn step<F>(&self, t: f64, y: &[f64], k: f64, mut f: F) -> Result<Vec<f64>>
    where
        F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
    {
        let mut out = y.to_vec();
        let mut stage = y.to_vec();
        for j in 0..4 {
            let slope = f(t + self.c[j] * k, &stage)?;
            let bk = self.b[j] * k;
            for (o, s) in out.iter_mut().zip(&slope) {
                *o += bk * s;
            }
            if j < 3 {
                let ak = self.a[j] * k;
                for ((st, y0), s) in stage.iter_mut().zip(y).zip(&slope) {
                    *st = y0 + ak * s;
                }
            }
        }
        Ok(out)
    }
}

impl Default for RkTableau {
    fn default() -> Self {
        Self::CLASSICAL
    }
}

/// Right-hand sides added to the two equations.
pub trait Forcing: Sync {
    fn g_eta(&self, x: f64, t: f64) -> f64;
    fn g_u(&self, x: f64, t: f64) -> f64;
}

/// Forcing that makes an [`ExactSolution`] solve the system exactly.
#[derive(Debug, Clone, Copy)]
pub struct MmsForcing<S>(pub S);

impl<S: ExactSolution> Forcing for MmsForcing<S> {
    fn g_eta(&self, x: f64, t: f64) -> f64 {
        self.0.forcing_eta(x, t)
    }

    fn g_u(&self, x: f64, t: f64) -> f64 {
        self.0.forcing_u(x, t)
    }
}

/// `(Phi, Phi_x)` from pointwise values of `H, H_x, U, U_x`.
#[inline]
pub fn phi_pointwise(h: f64, hx: f64, u: f64, ux: f64) -> (f64, f64) {
    (u + h * u, ux + hx * u + h * ux)
}

/// `F = H_x + U U_x`.
#[inline]
pub fn f_pointwise(hx: f64, u: f64, ux: f64) -> f64 {
    hx + u * ux
}

fn check_shared_mesh(h: &ProjectedFunction, u: &ProjectedFunction) -> Result<()> {
    if h.space().mesh() != u.space().mesh() {
        return invalid("H and U must be defined on the same mesh");
    }
    Ok(())
}

/// Pointwise evaluator of `x -> (Phi(x), Phi_x(x))`.
pub fn flux_phi<'a>(
    h: &'a ProjectedFunction,
    u: &'a ProjectedFunction,
) -> Result<impl Fn(f64) -> Result<(f64, f64)> + 'a> {
    check_shared_mesh(h, u)?;
    Ok(move |x: f64| {
        Ok(phi_pointwise(
            h.eval(x, 0)?,
            h.eval(x, 1)?,
            u.eval(x, 0)?,
            u.eval(x, 1)?,
        ))
    })
}

/// Pointwise evaluator of `x -> F(x)`.
pub fn flux_f<'a>(
    h: &'a ProjectedFunction,
    u: &'a ProjectedFunction,
) -> Result<impl Fn(f64) -> Result<f64> + 'a> {
    check_shared_mesh(h, u)?;
    Ok(move |x: f64| Ok(f_pointwise(h.eval(x, 1)?, u.eval(x, 0)?, u.eval(x, 1)?)))
}

/// Discrete elevation `H_h` in `S_h` and velocity `U_h` in `S_{h,0}` at `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub eta: ProjectedFunction,
    pub vel: ProjectedFunction,
    pub time: f64,
}

impl State {
    pub fn max_abs_coeff(&self) -> f64 {
        self.eta
            .coeffs()
            .iter()
            .chain(self.vel.coeffs())
            .fold(0.0, |m: f64, c| {
                if c.is_finite() {
                    m.max(c.abs())
                } else {
                    f64::NAN
                }
            })
    }
}

/// The pair of spaces `S_h`, `S_{h,0}` with their factorized mass matrices.
#[derive(Debug, Clone)]
pub struct ShallowWaterSolver {
    eta: Projector,
    vel: Projector,
    tableau: RkTableau,
}

impl ShallowWaterSolver {
    pub fn new(mesh: Mesh, r: usize, mu: usize, quad_points: Option<usize>) -> Result<Self> {
        let space = SplineSpace::new(mesh, r, mu, false)?;
        let vel_space = space.with_zero_bc(true);
        let eta = Projector::new(space, quad_points)?;
        let vel = Projector::new(vel_space, quad_points)?;
        eta.mass().factorize()?;
        vel.mass().factorize()?;
        Ok(Self {
            eta,
            vel,
            tableau: RkTableau::CLASSICAL,
        })
    }

    pub fn eta_projector(&self) -> &Projector {
        &self.eta
    }

    pub fn vel_projector(&self) -> &Projector {
        &self.vel
    }

    pub fn eta_space(&self) -> &Arc<SplineSpace> {
        self.eta.space()
    }

    pub fn vel_space(&self) -> &Arc<SplineSpace> {
        self.vel.space()
    }

    pub fn mesh(&self) -> &Mesh {
        self.eta.space().mesh()
    }

    /// `H^0 = P eta0`, `U^0 = P0 u0`.
    pub fn initial_state(
        &self,
        eta0: impl Fn(f64) -> f64,
        u0: impl Fn(f64) -> f64,
    ) -> Result<State> {
        Ok(State {
            eta: self.eta.project(eta0, &[])?,
            vel: self.vel.project(u0, &[])?,
            time: 0.0,
        })
    }

    pub fn zero_state(&self) -> State {
        State {
            eta: ProjectedFunction::zero(Arc::clone(self.eta.space())),
            vel: ProjectedFunction::zero(Arc::clone(self.vel.space())),
            time: 0.0,
        }
    }

    /// Time derivative of the coefficients of `(H, U)`:
    /// `-P[Phi_x] + P g_eta(., t)` and `-P0[F] + P0 g_u(., t)`.
    pub fn galerkin_rhs(
        &self,
        eta: &[f64],
        vel: &[f64],
        t: f64,
        forcing: Option<&dyn Forcing>,
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let space = self.eta.space();
        let vel_space = self.vel.space();
        if eta.len() != space.dim() || vel.len() != vel_space.dim() {
            return invalid(format!(
                "state has lengths ({}, {}), spaces have dimensions ({}, {})",
                eta.len(),
                vel.len(),
                space.dim(),
                vel_space.dim()
            ));
        }
        let r = space.order();
        let table = self.eta.table();
        let vel_full = vel_space.to_full(vel);
        let mut load_eta = vec![0.0; space.full_dim()];
        let mut load_vel = vec![0.0; space.full_dim()];
        for e in 0..space.mesh().num_elements() {
            let first = space.first_active(e);
            let hc = &eta[first..first + r];
            let uc = &vel_full[first..first + r];
            for q in 0..table.points_per_element() {
                let (x, w) = table.node(e, q);
                let b0 = table.basis(e, q, 0);
                let b1 = table.basis(e, q, 1);
                let (mut h, mut hx, mut u, mut ux) = (0.0, 0.0, 0.0, 0.0);
                for j in 0..r {
                    h += hc[j] * b0[j];
                    hx += hc[j] * b1[j];
                    u += uc[j] * b0[j];
                    ux += uc[j] * b1[j];
                }
                let (_, phi_x) = phi_pointwise(h, hx, u, ux);
                let flux = f_pointwise(hx, u, ux);
                let (ge, gu) = forcing.map_or((0.0, 0.0), |g| (g.g_eta(x, t), g.g_u(x, t)));
                let we = w * (ge - phi_x);
                let wu = w * (gu - flux);
                for j in 0..r {
                    load_eta[first + j] += we * b0[j];
                    load_vel[first + j] += wu * b0[j];
                }
            }
        }
        let mut load_vel: Vec<f64> = (0..space.full_dim())
            .filter_map(|i| vel_space.dof(i).map(|_| load_vel[i]))
            .collect();
        self.eta.mass().solve_in_place(&mut load_eta)?;
        self.vel.mass().solve_in_place(&mut load_vel)?;
        Ok((load_eta, load_vel))
    }

    /// One RK4 step of size `k`.
    pub fn rk4_step(&self, state: &State, k: f64, forcing: Option<&dyn Forcing>) -> Result<State> {
        if !(k > 0.0) {
            return invalid(format!("time step must be positive, got {k}"));
        }
        let n_eta = self.eta.space().dim();
        let y: Vec<f64> = state
            .eta
            .coeffs()
            .iter()
            .chain(state.vel.coeffs())
            .copied()
            .collect();
        let next = self.tableau.step(state.time, &y, k, |t, y| {
            let (de, du) = self.galerkin_rhs(&y[..n_eta], &y[n_eta..], t, forcing)?;
            Ok(de.into_iter().chain(du).collect())
        })?;
        Ok(State {
            eta: ProjectedFunction::new(Arc::clone(self.eta.space()), next[..n_eta].to_vec())?,
            vel: ProjectedFunction::new(Arc::clone(self.vel.space()), next[n_eta..].to_vec())?,
            time: state.time + k,
        })
    }

    /// `n_steps` RK4 steps of size `k`, aborting with [`Error::BlowUp`] as
    /// soon as a coefficient is non-finite or exceeds [`BLOW_UP_THRESHOLD`].
    pub fn evolve(
        &self,
        state: &State,
        k: f64,
        n_steps: usize,
        forcing: Option<&dyn Forcing>,
    ) -> Result<State> {
        let mut current = state.clone();
        for step in 1..=n_steps {
            current = self.rk4_step(&current, k, forcing)?;
            let max_abs = current.max_abs_coeff();
            if !(max_abs <= BLOW_UP_THRESHOLD) {
                return Err(Error::BlowUp {
                    step,
                    time: current.time,
                    max_abs,
                });
            }
        }
        Ok(current)
    }

    /// CSV `x,eta,u` sampled at the breakpoints and `per_element` interior
    /// points of each element.
    pub fn snapshot_csv(&self, state: &State, per_element: usize) -> String {
        let mesh = self.mesh();
        let eta = self.eta.space();
        let vel = self.vel.space();
        let mut out = String::from("x,eta,u\n");
        let mut push = |e: usize, x: f64| {
            let h = eta.eval_in_element(state.eta.coeffs(), e, x, 0);
            let u = vel.eval_in_element(state.vel.coeffs(), e, x, 0);
            out.push_str(&format!("{x:.12e},{h:.12e},{u:.12e}\n"));
        };
        for e in 0..mesh.num_elements() {
            let (a, b) = mesh.element(e);
            for i in 0..=per_element {
                push(e, a + (b - a) * i as f64 / (per_element + 1) as f64);
            }
        }
        push(mesh.num_elements() - 1, 1.0);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mms::Mms;

    fn solver(n: usize) -> ShallowWaterSolver {
        ShallowWaterSolver::new(Mesh::quasiuniform_a(n).unwrap(), 4, 2, None).unwrap()
    }

    #[test]
    fn tableau_constants() {
        let t = RkTableau::CLASSICAL;
        assert_eq!(t.a, [0.5, 0.5, 1.0]);
        assert!((t.b.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(t.c, [0.0, 0.5, 0.5, 1.0]);
    }

    #[test]
    fn zero_state_without_forcing_stays_zero() {
        let s = solver(4);
        let z = s.zero_state();
        let (de, du) = s
            .galerkin_rhs(z.eta.coeffs(), z.vel.coeffs(), 0.0, None)
            .unwrap();
        assert!(de.iter().chain(&du).all(|v| v.abs() < 1e-13));
        let after = s.evolve(&z, 0.01, 5, None).unwrap();
        assert!(after.max_abs_coeff() == 0.0);
        assert!((after.time - 0.05).abs() < 1e-15);
    }

    #[test]
    fn zero_steps_is_identity() {
        let s = solver(6);
        let st = s
            .initial_state(|x| x, |x| (std::f64::consts::PI * x).sin())
            .unwrap();
        assert_eq!(s.evolve(&st, 0.01, 0, None).unwrap(), st);
    }

    #[test]
    fn constant_elevation_initial_state() {
        let s = solver(8);
        let st = s.initial_state(|_| 1.75, |_| 0.0).unwrap();
        assert!(st.eta.coeffs().iter().all(|c| (c - 1.75).abs() < 1e-13));
    }

    #[test]
    fn nonpositive_step_is_rejected() {
        let s = solver(4);
        assert!(s.rk4_step(&s.zero_state(), 0.0, None).is_err());
    }

    #[test]
    fn flux_limits() {
        let s = solver(4);
        let st = s.initial_state(|x| 1.0 + x * x, |_| 0.0).unwrap();
        let phi = flux_phi(&st.eta, &st.vel).unwrap();
        let f = flux_f(&st.eta, &st.vel).unwrap();
        for &x in &[0.0, 0.3, 0.77, 1.0] {
            assert_eq!(phi(x).unwrap(), (0.0, 0.0));
            assert_eq!(f(x).unwrap(), st.eta.eval(x, 1).unwrap());
        }
    }

    #[test]
    fn mms_forcing_adapter() {
        let g = MmsForcing(Mms::One);
        assert_eq!(g.g_eta(0.3, 0.2), Mms::One.forcing_eta(0.3, 0.2));
        assert_eq!(g.g_u(0.3, 0.2), Mms::One.forcing_u(0.3, 0.2));
    }

    #[test]
    fn snapshot_layout() {
        let s = solver(2);
        let csv = s.snapshot_csv(&s.zero_state(), 3);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "x,eta,u");
        assert_eq!(lines.len(), 1 + 2 * 4 + 1);
    }
}
