//! Mirror-extension check of the inlet treatment.
//!
//! A steady problem on `(0, L)` with zero inlet pressure is extended to
//! `(-L, L)` by `f_e(x) = (f1(-x), -f2(-x))`, `g_e(x) = -g(-x)` and pressure
//! data `-h_o` on the far left. The extended solution has `u2` and `p` odd
//! in `x`, so its restriction must reproduce the single-domain solution.

use crate::error::Result;
use crate::geometry::BeamProfile;
use crate::linalg::SolverOptions;
use crate::stokes::{stokes_solve_steady, FluidGrid, Metric, Operators, StokesData};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryReport {
    pub velocity: f64,
    pub pressure: f64,
}

impl SymmetryReport {
    pub fn max(&self) -> f64 {
        self.velocity.max(self.pressure)
    }
}

/// Mirrored profile on `(0, 2L)` from a clamped profile on `(0, L)`.
fn mirror_profile(p: &BeamProfile) -> Result<BeamProfile> {
    let n = p.nodes();
    let mut v = Vec::with_capacity(2 * n - 1);
    v.extend(p.eta0.iter().rev());
    v.extend(p.eta0.iter().skip(1));
    BeamProfile::from_values(2.0 * p.length, v)
}

/// `data.theta_in` is ignored (the construction needs zero inlet pressure).
pub fn symmetry_harness(
    grid: &FluidGrid,
    profile: &BeamProfile,
    nu: f64,
    data: &StokesData,
    opts: SolverOptions,
) -> Result<SymmetryReport> {
    let g = grid;
    let ops = Operators::new(g, &Metric::new(g, profile)?);
    let mut single = data.clone();
    single.theta_in = vec![0.0; g.nz];
    let s = stokes_solve_steady(&ops, nu, &single, opts)?;

    let ge = FluidGrid::new(2 * g.nx, g.nz, 2.0 * g.length)?;
    let pe = mirror_profile(profile)?;
    let ops_e = Operators::new(&ge, &Metric::new(&ge, &pe)?);
    let n = g.nx;
    let mut de = StokesData::zero(&ge);
    for j in 0..g.nz {
        for i in 0..=n {
            let f1 = data.f[g.u1(i, j)];
            de.f[ge.u1(n + i, j)] = f1;
            de.f[ge.u1(n - i, j)] = f1;
        }
        de.theta_in[j] = -data.theta_out[j];
        de.theta_out[j] = data.theta_out[j];
    }
    for j in 0..=g.nz {
        for i in 0..n {
            let f2 = data.f[g.u2(i, j)];
            de.f[ge.u2(n + i, j)] = f2;
            de.f[ge.u2(n - 1 - i, j)] = -f2;
        }
    }
    for i in 0..n {
        de.top[n + i] = data.top[i];
        de.top[n - 1 - i] = -data.top[i];
    }
    let e = stokes_solve_steady(&ops_e, nu, &de, opts)?;

    let mut dv = 0.0f64;
    let mut dp = 0.0f64;
    for j in 0..g.nz {
        for i in 0..=n {
            dv = dv.max((e.u1[ge.u1(n + i, j)] - s.u1[g.u1(i, j)]).abs());
        }
        for i in 0..n {
            dp = dp.max((e.p[ge.cell(n + i, j)] - s.p[g.cell(i, j)]).abs());
        }
    }
    for j in 0..=g.nz {
        for i in 0..n {
            let a = e.u2[ge.u2(n + i, j) - ge.nvf()];
            let b = s.u2[g.u2(i, j) - g.nvf()];
            dv = dv.max((a - b).abs());
        }
    }
    Ok(SymmetryReport {
        velocity: dv,
        pressure: dp,
    })
}
