//! Partitioned step: beam first, then fluid with the new beam velocity as
//! top data.
//!
//! With the added mass on, the beam equation is
//! `(I + N_s)(eta_t - eta_t_prev) = dt (A eta + gamma eta_txx + P lambda_r + h)`
//! where `lambda_r` is the wall trace of the pressure part driven by the
//! force, the viscous term and the inlet/outlet data. The inertial part of the
//! pressure is the `N_s` response to the wall acceleration. Subiterating
//! beam and fluid converges to the monolithic step.
//!
//! With the added mass off the beam sees the full pressure trace of the last
//! fluid solve, which is the classical lagged splitting.

use super::problem::{CoupledProblem, CoupledState};
use crate::beam::{BeamScheme, BeamStepper};
use crate::error::{FsiError, Result};
use crate::linalg::norm_inf;
use crate::nonlinear::RhsLevel;
use crate::stokes::{EllipticSolver, FluidState, NeumannMaps, StokesSolver, WallBc};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AddedMass {
    /// Mass `I + N_s`.
    On,
    /// Mass `I`, full lagged pressure load.
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionedConfig {
    pub added_mass: AddedMass,
    pub max_sub: usize,
    /// Stop when `max |delta eta_t| <= sub_tol * max(1, max |eta_t|)`.
    pub sub_tol: f64,
}

impl Default for PartitionedConfig {
    fn default() -> Self {
        Self {
            added_mass: AddedMass::On,
            max_sub: 50,
            sub_tol: 1e-12,
        }
    }
}

/// Successive beam-velocity corrections of one step.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SubiterReport {
    pub increments: Vec<f64>,
    pub converged: bool,
}

impl SubiterReport {
    /// Geometric mean of the ratios of successive increments.
    pub fn growth_factor(&self) -> Option<f64> {
        let v: Vec<f64> = self.increments.iter().copied().filter(|d| *d > 0.0).collect();
        if v.len() < 3 {
            return None;
        }
        // skip the first increment, which carries the step itself
        let (a, b) = (v[1], v[v.len() - 1]);
        Some((b / a).powf(1.0 / (v.len() - 2) as f64))
    }
}

pub struct PartitionedSolver {
    pub problem: CoupledProblem,
    pub dt: f64,
    pub cfg: PartitionedConfig,
    stokes: StokesSolver,
    beam: BeamStepper,
    elliptic: EllipticSolver,
    ns: DMatrix<f64>,
}

impl PartitionedSolver {
    pub fn new(problem: &CoupledProblem, dt: f64, cfg: PartitionedConfig) -> Result<Self> {
        if cfg.max_sub == 0 {
            return Err(FsiError::Config("max_sub must be >= 1".into()));
        }
        let ns = NeumannMaps::new(&problem.ops, problem.nodes(), problem.opts)?.assemble_ns()?;
        let n = problem.nodes();
        let mass = match cfg.added_mass {
            AddedMass::On => DMatrix::identity(n, n) + &ns,
            AddedMass::Off => DMatrix::identity(n, n),
        };
        Ok(Self {
            stokes: StokesSolver::new(&problem.ops, problem.nu, Some(dt), problem.opts)?,
            beam: BeamStepper::new(&problem.beam, dt, Some(&mass), BeamScheme::ImplicitEuler)?,
            elliptic: EllipticSolver::new(&problem.ops, WallBc::Neumann, problem.opts)?,
            problem: problem.clone(),
            dt,
            cfg,
            ns,
        })
    }

    pub fn added_mass(&self) -> &DMatrix<f64> {
        &self.ns
    }

    /// Wall trace of the pressure part not driven by the wall acceleration.
    fn reduced_trace(&self, u: &[f64], level: &RhsLevel) -> Result<Vec<f64>> {
        let pr = &self.problem;
        let g = pr.grid();
        let lap = pr.ops.lap.matvec(u);
        let mut r: Vec<f64> = level.f.iter().zip(&lap).map(|(f, l)| f + pr.nu * l).collect();
        for k in 0..g.nvel() {
            if g.is_wall_face(k) {
                r[k] = 0.0;
            }
        }
        let s = pr.ops.div_u.matvec(&r);
        let bv = pr.ops.layout().sides(&level.theta_in, &level.theta_out);
        let phi = self.elliptic.solve(&s, Some(&bv), None)?;
        let top_lap = pr.top_lap.matvec(u);
        let f2 = pr.top_force(&level.f);
        Ok((0..g.nx)
            .map(|i| {
                phi[g.cell(i, g.nz - 1)] + 0.5 * g.hz * pr.ops.metric.j_c[i] * (f2[i] + pr.nu * top_lap[i])
            })
            .collect())
    }

    pub fn step(&self, prev: &CoupledState, level: &RhsLevel) -> Result<(CoupledState, SubiterReport)> {
        let pr = &self.problem;
        prev.check(pr)?;
        level.check(pr.grid(), pr.nodes())?;
        let g = pr.grid();
        let u_prev = prev.fluid.velocity();
        let mut u = u_prev.clone();
        let mut p = prev.fluid.p.clone();
        let mut beam = prev.beam.clone();
        let mut report = SubiterReport::default();
        for _ in 0..self.cfg.max_sub {
            let trace = match self.cfg.added_mass {
                AddedMass::On => self.reduced_trace(&u, level)?,
                AddedMass::Off => pr.pressure_trace(&u, &u_prev, &p, &level.f, self.dt),
            };
            let mut load = pr.transfer.beam(&trace)?;
            load.iter_mut().zip(&level.h).for_each(|(l, h)| *l += h);
            let next = self.beam.step(&prev.beam, &load)?;
            let inc = next
                .eta_t
                .iter()
                .zip(&beam.eta_t)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            beam = next;
            let data = level.stokes_data(pr.transfer.fluid(&beam.eta_t)?);
            let (un, pn) = self.stokes.solve(Some(&u_prev), &data)?;
            u = un;
            p = pn;
            report.increments.push(inc);
            if !inc.is_finite() {
                break;
            }
            if inc <= self.cfg.sub_tol * norm_inf(&beam.eta_t).max(1.0) {
                report.converged = true;
                break;
            }
        }
        let fluid = FluidState::from_velocity(g, &u, p, prev.t() + self.dt)?;
        Ok((CoupledState { fluid, beam }, report))
    }
}

/// One partitioned step with a fresh solver.
pub fn partitioned_step(
    problem: &CoupledProblem,
    state: &CoupledState,
    level: &RhsLevel,
    dt: f64,
    cfg: PartitionedConfig,
) -> Result<(CoupledState, SubiterReport)> {
    PartitionedSolver::new(problem, dt, cfg)?.step(state, level)
}
