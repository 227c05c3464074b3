//! Splitting of the unsteady Stokes pressure into `rho - q_t + p_f`.
//!
//! * `q`: harmonic, flux `g` through the top, no flux through the bottom,
//!   zero on inlet/outlet;
//! * `rho`: harmonic, flux `nu Lap(Pi u) . n` through both walls, equal to
//!   the pressure data on inlet/outlet;
//! * `p_f`: potential of the gradient part of the body force.
//!
//! The wall normal Laplacian uses a five-point one-sided stencil; this
//! diagnostic is implemented on the flat reference grid only.

use super::elliptic::EllipticSolver;
use super::grid::FluidState;
use super::ops::{Operators, WallBc};
use super::projector::{ProjectionRoute, Projector};
use super::system::StokesData;
use crate::error::{FsiError, Result};
use crate::linalg::SolverOptions;

#[derive(Debug, Clone)]
pub struct PressureSplit {
    pub rho: Vec<f64>,
    pub q_t: Vec<f64>,
    pub p_f: Vec<f64>,
    /// Discrete L2 norm of `p - (rho - q_t + p_f)`.
    pub mismatch: f64,
}

/// `d^2 f / dz^2` at `f[0]` from five equally spaced samples moving inward.
fn one_sided_second(f: [f64; 5], h: f64) -> f64 {
    (35.0 * f[0] - 104.0 * f[1] + 114.0 * f[2] - 56.0 * f[3] + 11.0 * f[4]) / (12.0 * h * h)
}

/// Splits the pressure of every level after the first. `data[n]` is the data
/// used to produce `states[n]`; `data[0]` supplies the initial top flux.
pub fn decompose_pressure(
    ops: &Operators,
    nu: f64,
    states: &[FluidState],
    data: &[StokesData],
    dt: f64,
    opts: SolverOptions,
) -> Result<Vec<PressureSplit>> {
    if !ops.metric.flat {
        return Err(FsiError::Precondition(
            "pressure decomposition is available on the flat reference grid only".into(),
        ));
    }
    if states.len() != data.len() {
        return Err(FsiError::Dimension {
            what: "pressure decomposition levels",
            expected: states.len(),
            got: data.len(),
        });
    }
    let g = &ops.grid;
    let lay = ops.layout();
    let mixed = EllipticSolver::new(ops, WallBc::Neumann, opts)?;
    let proj = Projector::new(ops, opts)?;
    let zero = vec![0.0; g.ncell()];
    let q_of = |d: &StokesData| -> Result<Vec<f64>> {
        let mut flux = vec![0.0; 2 * g.nx];
        flux[g.nx..].copy_from_slice(&d.top);
        mixed.solve(&zero, None, Some(&flux))
    };
    let mut q_prev = q_of(&data[0])?;
    let mut out = Vec::with_capacity(states.len().saturating_sub(1));
    for (s, d) in states.iter().zip(data).skip(1) {
        s.check(g)?;
        d.check(g)?;
        let q = q_of(d)?;
        let q_t: Vec<f64> = q.iter().zip(&q_prev).map(|(a, b)| (a - b) / dt).collect();
        q_prev = q;

        let pu = proj.project_with(&s.velocity(), ProjectionRoute::Mixed)?.u;
        let mut flux = vec![0.0; 2 * g.nx];
        for i in 0..g.nx {
            let bot = [0, 1, 2, 3, 4].map(|j| pu[g.u2(i, j)]);
            let top = [0, 1, 2, 3, 4].map(|j| pu[g.u2(i, g.nz - j)]);
            flux[i] = -nu * one_sided_second(bot, g.hz);
            flux[g.nx + i] = nu * one_sided_second(top, g.hz);
        }
        let theta = lay.sides(&d.theta_in, &d.theta_out);
        let rho = mixed.solve(&zero, Some(&theta), Some(&flux))?;

        let pf = proj.project_with(&d.f, ProjectionRoute::Mixed)?;
        let p_f: Vec<f64> = pf.p_u.iter().zip(&pf.q_u).map(|(a, b)| a + b).collect();

        let area = g.cell_area();
        let mismatch = (0..g.ncell())
            .map(|k| (s.p[k] - (rho[k] - q_t[k] + p_f[k])).powi(2) * area)
            .sum::<f64>()
            .sqrt();
        out.push(PressureSplit {
            rho,
            q_t,
            p_f,
            mismatch,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencil_exact_on_quartics() {
        let h = 0.1;
        let f = |z: f64| 1.0 + 2.0 * z - z * z + 0.5 * z.powi(3) + 0.25 * z.powi(4);
        let s = [0, 1, 2, 3, 4].map(|k| f(k as f64 * h));
        assert!((one_sided_second(s, h) - (-2.0)).abs() < 1e-9);
    }
}
