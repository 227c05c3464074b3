//! Discrete energy monitor along a trajectory.
//!
//! Fluid kinetic energy uses the physical velocity `M(u)` and the Jacobian
//! `1 + eta` of the flattened-to-current map. Dissipation and boundary power
//! use flattened differences and are meant as monitors, not as an exact
//! discrete balance.

use super::problem::{CoupledProblem, Trajectory};
use crate::beam::{beam_energy, BeamParams};
use crate::error::Result;
use crate::nonlinear::eval_m;
use crate::stokes::FluidGrid;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub t: f64,
    pub fluid_kinetic: f64,
    pub beam_kinetic: f64,
    pub beam_potential: f64,
    pub total: f64,
    /// `nu ||grad u||^2 + gamma ||eta_tx||^2`.
    pub dissipation: f64,
    /// `sum_j hz (theta_in u1(0, j) - theta_out u1(nx, j))` with `theta = -|u|^2 / 2`.
    pub boundary_power: f64,
}

/// `||grad u||^2` by staggered differences, with the no-slip wall value for
/// `u1` half a cell outside the first and last rows.
pub fn velocity_gradient_sq(g: &FluidGrid, u1: &[f64], u2: &[f64]) -> f64 {
    let a = g.hx * g.hz;
    let mut s = 0.0;
    let c1 = g.nx + 1;
    for j in 0..g.nz {
        for i in 0..g.nx {
            s += a * ((u1[j * c1 + i + 1] - u1[j * c1 + i]) / g.hx).powi(2);
        }
        for i in 0..=g.nx {
            let w = if i == 0 || i == g.nx { 0.5 } else { 1.0 };
            if j + 1 < g.nz {
                s += w * a * ((u1[(j + 1) * c1 + i] - u1[j * c1 + i]) / g.hz).powi(2);
            }
            if j == 0 || j + 1 == g.nz {
                s += w * 0.5 * a * (u1[j * c1 + i] / (0.5 * g.hz)).powi(2);
            }
        }
    }
    for j in 0..=g.nz {
        let w = if j == 0 || j == g.nz { 0.5 } else { 1.0 };
        for i in 0..g.nx.saturating_sub(1) {
            s += w * a * ((u2[j * g.nx + i + 1] - u2[j * g.nx + i]) / g.hx).powi(2);
        }
    }
    for j in 0..g.nz {
        for i in 0..g.nx {
            s += a * ((u2[(j + 1) * g.nx + i] - u2[j * g.nx + i]) / g.hz).powi(2);
        }
    }
    s
}

fn beam_rate_sq(params: &BeamParams, v: &[f64]) -> f64 {
    let h = params.h();
    v.windows(2).map(|p| h * ((p[1] - p[0]) / h).powi(2)).sum()
}

pub fn energy_report(problem: &CoupledProblem, traj: &Trajectory) -> Result<Vec<EnergySample>> {
    let g = problem.grid();
    let w = g.velocity_weights();
    let mut out = Vec::with_capacity(traj.states.len());
    for s in &traj.states {
        s.check(problem)?;
        let gm = problem.geometry(&s.beam)?;
        let u = s.fluid.velocity();
        let m = eval_m(g, &gm, &u)?;
        let mut fluid = 0.0;
        for j in 0..g.nz {
            for i in 0..=g.nx {
                let k = g.u1(i, j);
                fluid += 0.5 * w[k] * (1.0 + gm.eta_at(g.x_face(i))) * m[k] * m[k];
            }
        }
        for j in 0..=g.nz {
            for i in 0..g.nx {
                let k = g.u2(i, j);
                fluid += 0.5 * w[k] * (1.0 + gm.eta_at(g.x_center(i))) * m[k] * m[k];
            }
        }
        let (bk, bp) = beam_energy(&problem.beam, &s.beam);
        let dissipation = problem.nu * velocity_gradient_sq(g, &s.fluid.u1, &s.fluid.u2)
            + problem.beam.gamma * beam_rate_sq(&problem.beam, &s.beam.eta_t);
        let (tin, tout) = crate::nonlinear::eval_theta(g, &u)?;
        let boundary_power = (0..g.nz)
            .map(|j| g.hz * (tin[j] * u[g.u1(0, j)] - tout[j] * u[g.u1(g.nx, j)]))
            .sum();
        out.push(EnergySample {
            t: s.t(),
            fluid_kinetic: fluid,
            beam_kinetic: bk,
            beam_potential: bp,
            total: fluid + bk + bp,
            dissipation,
            boundary_power,
        });
    }
    Ok(out)
}

/// Largest per-step increase `E_{n+1} - E_n` (negative if strictly decreasing).
pub fn max_energy_increase(samples: &[EnergySample]) -> f64 {
    samples
        .windows(2)
        .map(|w| w[1].total - w[0].total)
        .fold(f64::NEG_INFINITY, f64::max)
}
