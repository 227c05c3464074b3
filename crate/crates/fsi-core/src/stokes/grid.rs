//! MAC grid on the flattened reference rectangle `(0, L) x (0, 1)` and the
//! metric of the terrain-following map `z' = z / (1 + eta0(x))`.
//!
//! Layout of a velocity vector: all `u1` values (vertical faces, index
//! `j * (nx + 1) + i`) followed by all `u2` values (horizontal faces, index
//! `j * nx + i`, including the boundary rows `j = 0` and `j = nz`).
//! Pressure lives at cell centers, index `j * nx + i`.

use crate::error::{check_len, FsiError, Result};
use crate::geometry::{fd, BeamProfile};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    /// Top, `Gamma_0` (under the beam).
    Top,
    /// Bottom wall, `Gamma_b`.
    Bottom,
    /// Left, `Gamma_i`.
    Inlet,
    /// Right, `Gamma_o`.
    Outlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluidGrid {
    pub nx: usize,
    pub nz: usize,
    pub length: f64,
    pub hx: f64,
    pub hz: f64,
}

impl FluidGrid {
    pub fn new(nx: usize, nz: usize, length: f64) -> Result<Self> {
        if nx < 8 || nz < 8 {
            return Err(FsiError::Config(format!(
                "fluid grid needs at least 8x8 cells, got {nx}x{nz}"
            )));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(FsiError::Config(format!("domain length must be > 0, got {length}")));
        }
        Ok(Self {
            nx,
            nz,
            length,
            hx: length / nx as f64,
            hz: 1.0 / nz as f64,
        })
    }

    pub fn nvf(&self) -> usize {
        (self.nx + 1) * self.nz
    }

    pub fn nhf(&self) -> usize {
        self.nx * (self.nz + 1)
    }

    pub fn nvel(&self) -> usize {
        self.nvf() + self.nhf()
    }

    pub fn ncell(&self) -> usize {
        self.nx * self.nz
    }

    #[inline]
    pub fn u1(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    #[inline]
    pub fn u2(&self, i: usize, j: usize) -> usize {
        self.nvf() + j * self.nx + i
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn x_face(&self, i: usize) -> f64 {
        i as f64 * self.hx
    }

    pub fn x_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.hx
    }

    pub fn z_face(&self, j: usize) -> f64 {
        j as f64 * self.hz
    }

    pub fn z_center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.hz
    }

    pub fn vf_tag(&self, i: usize) -> Option<Boundary> {
        if i == 0 {
            Some(Boundary::Inlet)
        } else if i == self.nx {
            Some(Boundary::Outlet)
        } else {
            None
        }
    }

    pub fn hf_tag(&self, j: usize) -> Option<Boundary> {
        if j == 0 {
            Some(Boundary::Bottom)
        } else if j == self.nz {
            Some(Boundary::Top)
        } else {
            None
        }
    }

    /// Quadrature weights of the discrete L2 inner product on velocities.
    /// Boundary faces carry half a cell.
    pub fn velocity_weights(&self) -> Vec<f64> {
        let a = self.hx * self.hz;
        let mut w = vec![a; self.nvel()];
        for j in 0..self.nz {
            w[self.u1(0, j)] = 0.5 * a;
            w[self.u1(self.nx, j)] = 0.5 * a;
        }
        for i in 0..self.nx {
            w[self.u2(i, 0)] = 0.5 * a;
            w[self.u2(i, self.nz)] = 0.5 * a;
        }
        w
    }

    pub fn cell_area(&self) -> f64 {
        self.hx * self.hz
    }

    pub fn split<'a>(&self, v: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        v.split_at(self.nvf())
    }

    /// Indices of the top horizontal faces (`j = nz`), left to right.
    pub fn top_faces(&self) -> Vec<usize> {
        (0..self.nx).map(|i| self.u2(i, self.nz)).collect()
    }

    pub fn bottom_faces(&self) -> Vec<usize> {
        (0..self.nx).map(|i| self.u2(i, 0)).collect()
    }

    /// Whether a velocity index is a Dirichlet (top or bottom) face.
    pub fn is_wall_face(&self, k: usize) -> bool {
        if k < self.nvf() {
            return false;
        }
        let j = (k - self.nvf()) / self.nx;
        j == 0 || j == self.nz
    }
}

/// Staggered velocity and cell pressure at one time level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluidState {
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub p: Vec<f64>,
    pub t: f64,
}

impl FluidState {
    pub fn zero(grid: &FluidGrid) -> Self {
        Self {
            u1: vec![0.0; grid.nvf()],
            u2: vec![0.0; grid.nhf()],
            p: vec![0.0; grid.ncell()],
            t: 0.0,
        }
    }

    pub fn from_velocity(grid: &FluidGrid, vel: &[f64], p: Vec<f64>, t: f64) -> Result<Self> {
        check_len("velocity", grid.nvel(), vel.len())?;
        check_len("pressure", grid.ncell(), p.len())?;
        let (u1, u2) = grid.split(vel);
        Ok(Self {
            u1: u1.to_vec(),
            u2: u2.to_vec(),
            p,
            t,
        })
    }

    pub fn velocity(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.u1.len() + self.u2.len());
        v.extend_from_slice(&self.u1);
        v.extend_from_slice(&self.u2);
        v
    }

    pub fn check(&self, grid: &FluidGrid) -> Result<()> {
        check_len("u1", grid.nvf(), self.u1.len())?;
        check_len("u2", grid.nhf(), self.u2.len())?;
        check_len("p", grid.ncell(), self.p.len())
    }
}

/// Metric of the flattening sampled at vertical-face and cell-center abscissae.
///
/// With `J = 1 + eta0`, `a = eta0_x / J` and `a_x = eta0_xx / J - eta0_x^2 / J^2`:
/// `d_x = d_x' - a z' d_z'`, `d_z = d_z' / J`.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    pub flat: bool,
    pub j_f: Vec<f64>,
    pub ex_f: Vec<f64>,
    pub a_f: Vec<f64>,
    pub ax_f: Vec<f64>,
    pub j_c: Vec<f64>,
    pub ex_c: Vec<f64>,
    pub a_c: Vec<f64>,
    pub ax_c: Vec<f64>,
}

impl Metric {
    pub fn flat(grid: &FluidGrid) -> Self {
        let nf = grid.nx + 1;
        let nc = grid.nx;
        Self {
            flat: true,
            j_f: vec![1.0; nf],
            ex_f: vec![0.0; nf],
            a_f: vec![0.0; nf],
            ax_f: vec![0.0; nf],
            j_c: vec![1.0; nc],
            ex_c: vec![0.0; nc],
            a_c: vec![0.0; nc],
            ax_c: vec![0.0; nc],
        }
    }

    pub fn new(grid: &FluidGrid, profile: &BeamProfile) -> Result<Self> {
        if (profile.length - grid.length).abs() > 1e-12 * grid.length {
            return Err(FsiError::Precondition(format!(
                "profile length {} differs from grid length {}",
                profile.length, grid.length
            )));
        }
        if profile.is_flat() {
            return Ok(Self::flat(grid));
        }
        let h = profile.h();
        let sample = |x: f64| {
            let e = fd::interp(&profile.eta0, h, x);
            let ex = fd::interp(&profile.eta0_x, h, x);
            let exx = fd::interp(&profile.eta0_xx, h, x);
            let j = 1.0 + e;
            (j, ex, ex / j, exx / j - ex * ex / (j * j))
        };
        let mut m = Self::flat(grid);
        m.flat = false;
        for i in 0..=grid.nx {
            let (j, ex, a, ax) = sample(grid.x_face(i));
            m.j_f[i] = j;
            m.ex_f[i] = ex;
            m.a_f[i] = a;
            m.ax_f[i] = ax;
        }
        for i in 0..grid.nx {
            let (j, ex, a, ax) = sample(grid.x_center(i));
            m.j_c[i] = j;
            m.ex_c[i] = ex;
            m.a_c[i] = a;
            m.ax_c[i] = ax;
        }
        Ok(m)
    }
}

/// Coefficients of the reference-domain Laplacian in flattened coordinates:
/// `d_x'x' + cxz d_x'z' + czz d_z'z' + cz d_z'`.
#[inline]
pub(crate) fn laplacian_coeffs(j: f64, a: f64, ax: f64, z: f64) -> (f64, f64, f64) {
    (-2.0 * a * z, a * a * z * z + 1.0 / (j * j), (a * a - ax) * z)
}
