//! Convergence table over the manufactured cases.

use super::coupled::{CoupledCase, TimeProfile};
use super::manufactured::{observed_orders, StokesCase};
use crate::beam::{BeamParams, BeamState};
use crate::coupling::{
    linear_coupled_solve, picard_solve, CoupledProblem, CoupledState, FixedPointReport, PicardConfig,
};
use crate::error::Result;
use crate::geometry::BeamProfile;
use crate::linalg::SolverOptions;
use crate::nonlinear::{RhsBundle, RhsLevel};
use crate::stokes::{stokes_solve_steady, FluidGrid, Metric, Operators, StokesSolver};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub name: String,
    /// `"h"` or `"dt"`.
    pub parameter: String,
    pub sizes: Vec<f64>,
    pub errors: Vec<f64>,
    pub orders: Vec<f64>,
    pub required: f64,
}

impl ConvergenceRow {
    fn new(name: &str, parameter: &str, sizes: Vec<f64>, errors: Vec<f64>, required: f64) -> Self {
        let orders = observed_orders(&errors);
        Self {
            name: name.into(),
            parameter: parameter.into(),
            sizes,
            errors,
            orders,
            required,
        }
    }

    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn passed(&self) -> bool {
        !self.orders.is_empty() && self.min_order() >= self.required
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    /// Coarsest grid; each level doubles it.
    pub base: usize,
    pub levels: usize,
    pub opts: SolverOptions,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            base: 8,
            levels: 3,
            opts: SolverOptions::default(),
        }
    }
}

pub const COUPLED_SPACE: CoupledCase = CoupledCase {
    nu: 0.1,
    alpha: 1.0,
    beta: 0.5,
    gamma: 0.1,
    length: 1.0,
    time: TimeProfile::Linear { rate: 1.0 },
};

pub const COUPLED_TIME: CoupledCase = CoupledCase {
    nu: 0.1,
    alpha: 1.0,
    beta: 0.5,
    gamma: 0.1,
    length: 1.0,
    time: TimeProfile::Sine {
        amp: 1.0,
        omega: 2.0 * std::f64::consts::PI,
    },
};

/// Flat channel matched to the case, with beam nodes on the vertical faces.
pub fn case_problem(case: &CoupledCase, n: usize, opts: SolverOptions) -> Result<CoupledProblem> {
    let g = FluidGrid::new(n, n, case.length)?;
    let profile = BeamProfile::zero(n + 1, case.length)?;
    let beam = BeamParams::new(case.alpha, case.beta, case.gamma, case.length, n + 1)?;
    CoupledProblem::new(&g, &profile, case.nu, beam, opts)
}

/// Final state of the linear coupled solve from the exact data at `t = 0`.
pub fn run_case(case: &CoupledCase, problem: &CoupledProblem, horizon: f64, steps: usize) -> Result<CoupledState> {
    let dt = horizon / steps as f64;
    let levels = (1..=steps)
        .map(|k| case.rhs(problem, k as f64 * dt))
        .collect::<Result<Vec<_>>>()?;
    let x0 = case.state(problem, 0.0)?;
    let traj = linear_coupled_solve(problem, &x0, &RhsBundle { levels }, dt)?;
    Ok(traj.last().clone())
}

/// Errors of the exactly-integrable case on grids `base * 2^k`.
pub fn coupled_space_row(cfg: &SuiteConfig) -> Result<ConvergenceRow> {
    let case = COUPLED_SPACE;
    let (mut sizes, mut errors) = (Vec::new(), Vec::new());
    for k in 0..cfg.levels {
        let n = cfg.base << k;
        let pr = case_problem(&case, n, cfg.opts)?;
        let end = run_case(&case, &pr, 0.1, 5)?;
        let (eu, ee) = case.errors(&pr, &end)?;
        sizes.push(case.length / n as f64);
        errors.push(eu + ee);
    }
    Ok(ConvergenceRow::new("coupled linear (space)", "h", sizes, errors, 1.9))
}

/// Self-convergence in the step: differences of successive halvings at the
/// final time on a fixed grid.
pub fn coupled_time_row(cfg: &SuiteConfig) -> Result<ConvergenceRow> {
    let case = COUPLED_TIME;
    let horizon = 0.5;
    let pr = case_problem(&case, 2 * cfg.base, cfg.opts)?;
    let g = *pr.grid();
    let w = g.velocity_weights();
    let runs = (0..=cfg.levels)
        .map(|k| run_case(&case, &pr, horizon, 10 << k))
        .collect::<Result<Vec<_>>>()?;
    let mut sizes = Vec::new();
    let mut errors = Vec::new();
    for k in 0..cfg.levels {
        let (a, b) = (&runs[k], &runs[k + 1]);
        let (ua, ub) = (a.fluid.velocity(), b.fluid.velocity());
        let du = (0..g.nvel()).map(|i| w[i] * (ua[i] - ub[i]).powi(2)).sum::<f64>().sqrt();
        let de = a.beam.eta.iter().zip(&b.beam.eta).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        sizes.push(horizon / (10 << k) as f64);
        errors.push(du + de);
    }
    Ok(ConvergenceRow::new("coupled linear (time)", "dt", sizes, errors, 0.9))
}

pub fn stokes_steady_row(cfg: &SuiteConfig) -> Result<ConvergenceRow> {
    let case = StokesCase::steady(0.3, 1.5);
    let (mut sizes, mut errors) = (Vec::new(), Vec::new());
    for k in 0..cfg.levels {
        let n = (2 * cfg.base) << k;
        let g = FluidGrid::new(n, n, case.length)?;
        let ops = Operators::new(&g, &Metric::flat(&g));
        let s = stokes_solve_steady(&ops, case.nu, &case.data(&g, 0.0), cfg.opts)?;
        sizes.push(g.hx);
        errors.push(case.errors(&g, &s).0);
    }
    Ok(ConvergenceRow::new("stokes steady", "h", sizes, errors, 1.9))
}

pub fn stokes_unsteady_row(cfg: &SuiteConfig) -> Result<ConvergenceRow> {
    let case = StokesCase::unsteady(0.2, 1.0);
    let horizon = 0.5;
    let g = FluidGrid::new(4 * cfg.base, 4 * cfg.base, case.length)?;
    let ops = Operators::new(&g, &Metric::flat(&g));
    let (mut sizes, mut errors) = (Vec::new(), Vec::new());
    for k in 0..cfg.levels {
        let steps = 5 << k;
        let dt = horizon / steps as f64;
        let solver = StokesSolver::new(&ops, case.nu, Some(dt), cfg.opts)?;
        let mut s = case.state(&g, 0.0);
        for n in 1..=steps {
            s = solver.step(&s, &case.data(&g, n as f64 * dt))?;
        }
        sizes.push(dt);
        errors.push(case.errors(&g, &s).0);
    }
    Ok(ConvergenceRow::new("stokes unsteady", "dt", sizes, errors, 0.85))
}

/// Graph-mode problem at rest on its reference, with the beam load balancing
/// the discrete stiffness. The nonlinear terms vanish at the exact state.
pub fn reference_collapse(n: usize, amplitude: f64, opts: SolverOptions) -> Result<FixedPointReport> {
    let g = FluidGrid::new(n, n, 1.0)?;
    let profile = BeamProfile::bump(n + 1, 1.0, amplitude)?;
    let beam = BeamParams::new(1.0, 0.5, 0.1, 1.0, n + 1)?;
    let pr = CoupledProblem::new(&g, &profile, 0.1, beam, opts)?;
    let x0 = CoupledState {
        fluid: crate::stokes::FluidState::zero(&g),
        beam: BeamState {
            eta: profile.eta0.clone(),
            eta_t: vec![0.0; n + 1],
            t: 0.0,
        },
    };
    let stiffness = crate::beam::operator_matrix(&beam);
    let load = stiffness.matvec(&profile.eta0);
    let forcing = move |p: &CoupledProblem, _t: f64| -> Result<RhsLevel> {
        let mut r = RhsLevel::zero(p.grid(), p.nodes());
        for k in 1..p.nodes() - 1 {
            r.h[k] = -load[k];
        }
        Ok(r)
    };
    let cfg = PicardConfig {
        horizon: 0.1,
        dt: 0.02,
        ..PicardConfig::default()
    };
    Ok(picard_solve(&pr, &x0, &forcing, &cfg)?.report)
}

/// Every row of the table.
pub fn manufactured_suite(cfg: &SuiteConfig) -> Result<Vec<ConvergenceRow>> {
    Ok(vec![
        stokes_steady_row(cfg)?,
        stokes_unsteady_row(cfg)?,
        coupled_space_row(cfg)?,
        coupled_time_row(cfg)?,
    ])
}
