//! Implicit-Euler step of the linear coupled system as one saddle-point
//! solve over `[u, eta_t, p]`.
//!
//! Beam rows carry the wall pressure trace
//! `lambda = p(i, nz-1) + hz/2 J (f2 - (u2 - u2_prev) / dt + nu Lap u2)`
//! at the top faces, moved to beam nodes by the adjoint transfer.

use super::problem::{CoupledProblem, CoupledState, Trajectory};
use crate::beam::{laplacian_matrix, operator_matrix, BeamState};
use crate::error::{FsiError, Result};
use crate::linalg::{Csr, LinearSolver, TripletBuilder};
use crate::nonlinear::{RhsBundle, RhsLevel};
use crate::stokes::system::{momentum_rhs, push_fluid_rows, saddle_solver};
use crate::stokes::FluidState;

pub struct LinearCoupledSolver {
    pub problem: CoupledProblem,
    pub dt: f64,
    solver: LinearSolver,
    a_beam: Csr,
    /// `hz/2 J` on the top faces.
    half: Vec<f64>,
}

impl LinearCoupledSolver {
    pub fn new(problem: &CoupledProblem, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(FsiError::Config(format!("time step must be > 0, got {dt}")));
        }
        let pr = problem;
        let g = pr.grid();
        let nb = pr.nodes();
        let (nvel, ncell) = (g.nvel(), g.ncell());
        let (ob, op) = (nvel, nvel + nb);
        let n = nvel + nb + ncell;
        let nu = pr.nu;
        let half: Vec<f64> = pr.ops.metric.j_c.iter().map(|j| 0.5 * g.hz * j).collect();
        let a_beam = operator_matrix(&pr.beam);
        let lap_b = laplacian_matrix(&pr.beam);

        let mut t = TripletBuilder::new(n, n);
        push_fluid_rows(&mut t, &pr.ops, nu, 1.0 / dt, op, op);
        for i in 0..g.nx {
            for (k, v) in pr.transfer.to_fluid.row(i) {
                t.push(g.u2(i, g.nz), ob + k, -v);
            }
        }
        t.push(ob, ob, 1.0);
        t.push(ob + nb - 1, ob + nb - 1, 1.0);
        for r in 1..nb - 1 {
            let row = ob + r;
            t.push(row, row, 1.0);
            for (c, v) in lap_b.row(r) {
                t.push(row, ob + c, -dt * pr.beam.gamma * v);
            }
            for (c, v) in a_beam.row(r) {
                t.push(row, ob + c, -dt * dt * v);
            }
            for (i, pk) in pr.transfer.to_beam.row(r) {
                let s = -dt * pk;
                t.push(row, op + g.cell(i, g.nz - 1), s);
                t.push(row, g.u2(i, g.nz), -s * half[i] / dt);
                for (c, v) in pr.top_lap.row(i) {
                    t.push(row, c, s * half[i] * nu * v);
                }
            }
        }
        let k = t.build();
        let solver = saddle_solver(k, &pr.ops, nvel + nb, nu, 1.0 / dt, pr.opts, "coupled step")?;
        Ok(Self {
            problem: pr.clone(),
            dt,
            solver,
            a_beam,
            half,
        })
    }

    pub fn matrix(&self) -> &Csr {
        self.solver.matrix()
    }

    fn rhs(&self, prev: &CoupledState, level: &RhsLevel) -> Vec<f64> {
        let pr = &self.problem;
        let g = pr.grid();
        let nb = pr.nodes();
        let dt = self.dt;
        let u_prev = prev.fluid.velocity();
        let data = level.stokes_data(vec![0.0; g.nx]);
        let mut rhs = momentum_rhs(&pr.ops, &data, 1.0 / dt, Some(&u_prev));
        let f2 = pr.top_force(&level.f);
        let wall: Vec<f64> = (0..g.nx)
            .map(|i| self.half[i] * (f2[i] + u_prev[g.u2(i, g.nz)] / dt))
            .collect();
        let pw = pr.transfer.to_beam.matvec(&wall);
        let a_eta = self.a_beam.matvec(&prev.beam.eta);
        let mut b = vec![0.0; nb];
        for r in 1..nb - 1 {
            b[r] = prev.beam.eta_t[r] + dt * (a_eta[r] + level.h[r] + pw[r]);
        }
        rhs.extend(b);
        rhs.extend(std::iter::repeat(0.0).take(g.ncell()));
        rhs
    }

    fn pack(&self, s: &CoupledState) -> Vec<f64> {
        let mut x = s.fluid.velocity();
        x.extend_from_slice(&s.beam.eta_t);
        x.extend_from_slice(&s.fluid.p);
        x
    }

    /// Advances `prev` one step with the data of the new level.
    pub fn step(&self, prev: &CoupledState, level: &RhsLevel) -> Result<CoupledState> {
        let pr = &self.problem;
        prev.check(pr)?;
        level.check(pr.grid(), pr.nodes())?;
        let x = self.solver.solve(&self.rhs(prev, level))?;
        let g = pr.grid();
        let nb = pr.nodes();
        let (u, rest) = x.split_at(g.nvel());
        let (eta_t, p) = rest.split_at(nb);
        let t = prev.t() + self.dt;
        let eta = prev.beam.eta.iter().zip(eta_t).map(|(e, v)| e + self.dt * v).collect();
        Ok(CoupledState {
            fluid: FluidState::from_velocity(g, u, p.to_vec(), t)?,
            beam: BeamState {
                eta,
                eta_t: eta_t.to_vec(),
                t,
            },
        })
    }

    /// Residual of the step equations at `(prev, next)`, each row scaled by
    /// its absolute row sum and the result by `max(1, max|x|)`. Also checks
    /// the displacement update.
    pub fn step_residual(&self, prev: &CoupledState, next: &CoupledState, level: &RhsLevel) -> Result<f64> {
        let pr = &self.problem;
        prev.check(pr)?;
        next.check(pr)?;
        level.check(pr.grid(), pr.nodes())?;
        let x = self.pack(next);
        let mut r = self.rhs(prev, level);
        let a = self.matrix();
        a.matvec_add(&x, -1.0, &mut r);
        let mut worst = 0.0f64;
        for (row, ri) in r.iter().enumerate() {
            let s: f64 = a.row(row).map(|(_, v)| v.abs()).sum();
            worst = worst.max(ri.abs() / s.max(f64::MIN_POSITIVE));
        }
        for k in 0..pr.nodes() {
            let d = next.beam.eta[k] - prev.beam.eta[k] - self.dt * next.beam.eta_t[k];
            worst = worst.max(d.abs());
        }
        let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        Ok(worst / scale)
    }

    /// Solves the slab `levels[0..N]` from `x0`.
    pub fn solve(&self, x0: &CoupledState, rhs: &RhsBundle) -> Result<Trajectory> {
        let mut states = Vec::with_capacity(rhs.steps() + 1);
        states.push(x0.clone());
        for level in &rhs.levels {
            let next = self.step(states.last().expect("nonempty"), level)?;
            states.push(next);
        }
        Ok(Trajectory { dt: self.dt, states })
    }
}

/// `max |u2_top - T eta_t|` over the top faces.
pub fn kinematic_residual(problem: &CoupledProblem, state: &CoupledState) -> Result<f64> {
    let g = problem.grid();
    state.check(problem)?;
    let top = problem.transfer.fluid(&state.beam.eta_t)?;
    Ok((0..g.nx).fold(0.0f64, |m, i| m.max((state.fluid.u2[i + g.nz * g.nx] - top[i]).abs())))
}

/// One monolithic slab solve.
pub fn linear_coupled_solve(problem: &CoupledProblem, x0: &CoupledState, rhs: &RhsBundle, dt: f64) -> Result<Trajectory> {
    LinearCoupledSolver::new(problem, dt)?.solve(x0, rhs)
}
