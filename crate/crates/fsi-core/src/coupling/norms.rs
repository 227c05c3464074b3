//! Discrete stand-in for the space-time solution norm of a trajectory.
//!
//! Derivatives are plain differences in flattened coordinates, scaled by the
//! cell area, so the norms are equivalent to the continuous ones only up to
//! metric constants.

use super::problem::{CoupledState, Trajectory};
use crate::beam::BeamParams;
use crate::stokes::FluidGrid;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormWeights {
    pub velocity_h1: f64,
    pub displacement_h2: f64,
    pub beam_velocity: f64,
    /// Weight of the time-integrated part.
    pub integral: f64,
}

impl Default for NormWeights {
    fn default() -> Self {
        Self {
            velocity_h1: 1.0,
            displacement_h2: 1.0,
            beam_velocity: 1.0,
            integral: 1.0,
        }
    }
}

/// A `rows x cols` array stored row-major.
struct Array<'a> {
    v: &'a [f64],
    cols: usize,
    rows: usize,
}

impl Array<'_> {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.v[j * self.cols + i]
    }

    /// Sums of squares of `(values, first differences, second differences)`.
    fn sums(&self, hx: f64, hz: f64) -> [f64; 3] {
        let mut s = [0.0; 3];
        for j in 0..self.rows {
            for i in 0..self.cols {
                let f = self.at(i, j);
                s[0] += f * f;
                if i + 1 < self.cols {
                    s[1] += ((self.at(i + 1, j) - f) / hx).powi(2);
                }
                if j + 1 < self.rows {
                    s[1] += ((self.at(i, j + 1) - f) / hz).powi(2);
                }
                if i > 0 && i + 1 < self.cols {
                    s[2] += ((self.at(i + 1, j) - 2.0 * f + self.at(i - 1, j)) / (hx * hx)).powi(2);
                }
                if j > 0 && j + 1 < self.rows {
                    s[2] += ((self.at(i, j + 1) - 2.0 * f + self.at(i, j - 1)) / (hz * hz)).powi(2);
                }
                if i + 1 < self.cols && j + 1 < self.rows {
                    let m = self.at(i + 1, j + 1) - self.at(i + 1, j) - self.at(i, j + 1) + f;
                    s[2] += 2.0 * (m / (hx * hz)).powi(2);
                }
            }
        }
        let a = hx * hz;
        [s[0] * a, s[1] * a, s[2] * a]
    }
}

fn velocity_sums(g: &FluidGrid, u1: &[f64], u2: &[f64]) -> [f64; 3] {
    let a = Array { v: u1, cols: g.nx + 1, rows: g.nz }.sums(g.hx, g.hz);
    let b = Array { v: u2, cols: g.nx, rows: g.nz + 1 }.sums(g.hx, g.hz);
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn velocity_h1(g: &FluidGrid, u1: &[f64], u2: &[f64]) -> f64 {
    let s = velocity_sums(g, u1, u2);
    (s[0] + s[1]).sqrt()
}

pub fn velocity_h2(g: &FluidGrid, u1: &[f64], u2: &[f64]) -> f64 {
    let s = velocity_sums(g, u1, u2);
    (s[0] + s[1] + s[2]).sqrt()
}

pub fn pressure_h1(g: &FluidGrid, p: &[f64]) -> f64 {
    let s = Array { v: p, cols: g.nx, rows: g.nz }.sums(g.hx, g.hz);
    (s[0] + s[1]).sqrt()
}

/// `sqrt(sum_{m <= order} ||d^m f||^2)` on beam nodes, trapezoidal in space,
/// one-sided at the ends.
pub fn beam_hk(params: &BeamParams, f: &[f64], order: usize) -> f64 {
    let h = params.h();
    let w = params.weights();
    let mut total: f64 = f.iter().zip(&w).map(|(v, w)| w * v * v).sum();
    let mut d = f.to_vec();
    for _ in 0..order {
        d = d.windows(2).map(|p| (p[1] - p[0]) / h).collect();
        total += d.iter().map(|v| h * v * v).sum::<f64>();
    }
    total.sqrt()
}

pub fn beam_l2(params: &BeamParams, f: &[f64]) -> f64 {
    beam_hk(params, f, 0)
}

fn level_sup(g: &FluidGrid, params: &BeamParams, s: &CoupledState, w: &NormWeights) -> f64 {
    w.velocity_h1 * velocity_h1(g, &s.fluid.u1, &s.fluid.u2)
        + w.displacement_h2 * beam_hk(params, &s.beam.eta, 2)
        + w.beam_velocity * beam_l2(params, &s.beam.eta_t)
}

fn level_integrand(g: &FluidGrid, params: &BeamParams, s: &CoupledState) -> f64 {
    velocity_h2(g, &s.fluid.u1, &s.fluid.u2).powi(2)
        + beam_hk(params, &s.beam.eta, 4).powi(2)
        + pressure_h1(g, &s.fluid.p).powi(2)
}

/// `max_n (sup part) + sqrt(sum_{n >= 1} dt (integrand))`.
pub fn trajectory_norm(g: &FluidGrid, params: &BeamParams, traj: &Trajectory, w: &NormWeights) -> f64 {
    let sup = traj
        .states
        .iter()
        .map(|s| level_sup(g, params, s, w))
        .fold(0.0, f64::max);
    let integral: f64 = traj.states.iter().skip(1).map(|s| traj.dt * level_integrand(g, params, s)).sum();
    sup + w.integral * integral.sqrt()
}
