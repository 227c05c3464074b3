//! Discrete samples of face fields and their reference-domain derivatives.
//!
//! Derivatives are taken with centered stencils in the flattened coordinates
//! (same ghost rules as the vector Laplacian) and mapped to the reference
//! domain by the chain rule of the flattening.

use crate::stokes::ops::{u1_at, u2_at};
use crate::stokes::FluidGrid;

/// Value and first/second derivatives at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Derivs {
    pub v: f64,
    pub x: f64,
    pub z: f64,
    pub xx: f64,
    pub xz: f64,
    pub zz: f64,
}

impl Derivs {
    /// Flattened-coordinate derivatives of a lattice function at `(i, j)`.
    pub fn flat(f: &dyn Fn(isize, isize) -> f64, i: isize, j: isize, hx: f64, hz: f64) -> Self {
        let c = f(i, j);
        let (e, w, n, s) = (f(i + 1, j), f(i - 1, j), f(i, j + 1), f(i, j - 1));
        Self {
            v: c,
            x: (e - w) / (2.0 * hx),
            z: (n - s) / (2.0 * hz),
            xx: (e - 2.0 * c + w) / (hx * hx),
            zz: (n - 2.0 * c + s) / (hz * hz),
            xz: (f(i + 1, j + 1) - f(i + 1, j - 1) - f(i - 1, j + 1) + f(i - 1, j - 1)) / (4.0 * hx * hz),
        }
    }

    /// Chain rule from `(x', z')` to the reference coordinates, `z = J z'`.
    pub fn to_reference(self, j: f64, a: f64, ax: f64, zp: f64) -> Self {
        Self {
            v: self.v,
            x: self.x - a * zp * self.z,
            z: self.z / j,
            xx: self.xx - 2.0 * a * zp * self.xz + a * a * zp * zp * self.zz + (a * a - ax) * zp * self.z,
            xz: (self.xz - a * self.z - a * zp * self.zz) / j,
            zz: self.zz / (j * j),
        }
    }
}

pub(crate) fn u1_value(g: &FluidGrid, u: &[f64], i: isize, j: isize) -> f64 {
    let (k, s) = u1_at(g, i, j);
    s * u[k]
}

pub(crate) fn u2_value(g: &FluidGrid, u: &[f64], i: isize, j: isize) -> f64 {
    let (k, s) = u2_at(g, i, j);
    s * u[k]
}

/// `u2` averaged onto vertical face `(i, j)`; zero on the inlet/outlet.
pub fn u2_at_vf(g: &FluidGrid, u: &[f64], i: usize, j: usize) -> f64 {
    let (i, j) = (i as isize, j as isize);
    0.25 * (u2_value(g, u, i - 1, j) + u2_value(g, u, i, j) + u2_value(g, u, i - 1, j + 1) + u2_value(g, u, i, j + 1))
}

/// `u1` averaged onto horizontal face `(i, j)`; zero on the walls.
pub fn u1_at_hf(g: &FluidGrid, u: &[f64], i: usize, j: usize) -> f64 {
    let (i, j) = (i as isize, j as isize);
    0.25 * (u1_value(g, u, i, j - 1) + u1_value(g, u, i + 1, j - 1) + u1_value(g, u, i, j) + u1_value(g, u, i + 1, j))
}

/// Flattened derivatives of `u1` at vertical face `(i, j)`.
pub fn u1_flat(g: &FluidGrid, u: &[f64], i: usize, j: usize) -> Derivs {
    Derivs::flat(&|a, b| u1_value(g, u, a, b), i as isize, j as isize, g.hx, g.hz)
}

/// Flattened derivatives of `u2` at interior horizontal face `(i, j)`.
pub fn u2_flat(g: &FluidGrid, u: &[f64], i: usize, j: usize) -> Derivs {
    debug_assert!(j > 0 && j < g.nz);
    Derivs::flat(&|a, b| u2_value(g, u, a, b), i as isize, j as isize, g.hx, g.hz)
}

/// Flattened `(d_x' p, d_z' p)` of a cell scalar at interior vertical face
/// `(i, j)`, `0 < i < nx`; `d_z'` is one-sided in the wall rows.
pub fn p_flat_at_vf(g: &FluidGrid, p: &[f64], i: usize, j: usize) -> (f64, f64) {
    debug_assert!(i > 0 && i < g.nx);
    let dz = |c: usize| {
        if j > 0 && j + 1 < g.nz {
            (p[g.cell(c, j + 1)] - p[g.cell(c, j - 1)]) / (2.0 * g.hz)
        } else if j == 0 {
            (p[g.cell(c, 1)] - p[g.cell(c, 0)]) / g.hz
        } else {
            (p[g.cell(c, j)] - p[g.cell(c, j - 1)]) / g.hz
        }
    };
    (
        (p[g.cell(i, j)] - p[g.cell(i - 1, j)]) / g.hx,
        0.5 * (dz(i - 1) + dz(i)),
    )
}

/// Flattened top-wall traces at top face `i`:
/// `(d_z' u1, u2, d_x' u2, d_z' u2)`, second order one-sided in `z'`.
pub fn top_traces(g: &FluidGrid, u: &[f64], i: usize) -> (f64, f64, f64, f64) {
    let nz = g.nz;
    let ii = i as isize;
    let row = |j: usize| 0.5 * (u[g.u1(i, j)] + u[g.u1(i + 1, j)]);
    let u1z = (-9.0 * row(nz - 1) + row(nz - 2)) / (3.0 * g.hz);
    let top = nz as isize;
    let u2x = (u2_value(g, u, ii + 1, top) - u2_value(g, u, ii - 1, top)) / (2.0 * g.hx);
    let u2z = (3.0 * u[g.u2(i, nz)] - 4.0 * u[g.u2(i, nz - 1)] + u[g.u2(i, nz - 2)]) / (2.0 * g.hz);
    (u1z, u[g.u2(i, nz)], u2x, u2z)
}
