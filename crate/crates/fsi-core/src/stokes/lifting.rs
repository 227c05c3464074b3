//! Divergence-free lifting of top-boundary normal velocity through a
//! stream function defined at cell corners.
//!
//! `phi(x, z') = G(x) S(z')` with `G` the running integral of the trace and
//! `S` a quintic cutoff (`S = 0` below `1 - delta`, `S(1) = 1`, `S'(1) = 0`).
//! Fluxes are `V1 = -d_z' phi`, `V2 = d_x phi`, so the discrete divergence
//! cancels term by term.

use super::ops::Operators;
use crate::error::{check_len, FsiError, Result};
use crate::stokes::grid::FluidGrid;

pub const DEFAULT_CUTOFF: f64 = 0.5;

/// Normal velocity on the top boundary: values at the `nx` top face centers
/// plus the two corner values, which must vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct TopTrace {
    pub faces: Vec<f64>,
    pub left: f64,
    pub right: f64,
}

impl TopTrace {
    pub fn from_faces(faces: Vec<f64>) -> Self {
        Self {
            faces,
            left: 0.0,
            right: 0.0,
        }
    }

    pub fn from_fn(grid: &FluidGrid, f: impl Fn(f64) -> f64) -> Self {
        Self {
            faces: (0..grid.nx).map(|i| f(grid.x_center(i))).collect(),
            left: f(0.0),
            right: f(grid.length),
        }
    }

    pub fn zero(grid: &FluidGrid) -> Self {
        Self::from_faces(vec![0.0; grid.nx])
    }

    fn check(&self, grid: &FluidGrid) -> Result<()> {
        check_len("top trace", grid.nx, self.faces.len())?;
        let scale = self.faces.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        if self.left.abs() > 1e-12 * scale || self.right.abs() > 1e-12 * scale {
            return Err(FsiError::Precondition(format!(
                "top trace must vanish at the corners (got {:.3e}, {:.3e})",
                self.left, self.right
            )));
        }
        if self.faces.iter().any(|v| !v.is_finite()) {
            return Err(FsiError::Precondition("top trace is not finite".into()));
        }
        Ok(())
    }
}

/// Quintic smoothstep cutoff supported in `[1 - delta, 1]`.
pub fn cutoff(z: f64, delta: f64) -> f64 {
    let t = ((z - (1.0 - delta)) / delta).clamp(0.0, 1.0);
    t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
}

/// Divergence-free physical velocity whose top normal flux is `g`, vanishing
/// on the bottom and below `1 - delta`.
pub fn lift_divfree(ops: &Operators, g: &TopTrace, delta: f64) -> Result<Vec<f64>> {
    let grid = &ops.grid;
    g.check(grid)?;
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(FsiError::Precondition(format!("cutoff width must lie in (0, 1], got {delta}")));
    }
    let (nx, nz) = (grid.nx, grid.nz);
    let mut big_g = vec![0.0; nx + 1];
    for i in 0..nx {
        big_g[i + 1] = big_g[i] + grid.hx * g.faces[i];
    }
    let s: Vec<f64> = (0..=nz).map(|j| cutoff(grid.z_face(j), delta)).collect();
    let mut v = vec![0.0; grid.nvel()];
    for j in 0..nz {
        let ds = (s[j + 1] - s[j]) / grid.hz;
        for i in 0..=nx {
            v[grid.u1(i, j)] = -big_g[i] * ds;
        }
    }
    for j in 0..=nz {
        for i in 0..nx {
            v[grid.u2(i, j)] = (big_g[i + 1] - big_g[i]) / grid.hx * s[j];
        }
    }
    Ok(ops.piola.matvec(&v))
}
