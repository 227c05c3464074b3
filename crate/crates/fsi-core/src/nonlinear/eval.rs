//! Transformed nonlinearities evaluated on the staggered grid.
//!
//! Velocity-like results live on the velocity faces (first component on
//! vertical faces, second on horizontal faces). Body forces have zero wall
//! rows. Reference coordinates are `(x, z)` with `z = (1 + eta0) z'`; all
//! `eta~` quantities come from the geometry map of the same time level.

use super::sample::{p_flat_at_vf, top_traces, u1_at_hf, u1_flat, u2_at_vf, u2_flat, Derivs};
use crate::error::{check_len, FsiError, Result};
use crate::geometry::{GeomSample, GeometryMap};
use crate::stokes::{FluidGrid, Operators, Transfer};

struct Columns {
    face: Vec<GeomSample>,
    center: Vec<GeomSample>,
}

impl Columns {
    fn new(g: &FluidGrid, gm: &GeometryMap) -> Result<Self> {
        if (gm.profile.length - g.length).abs() > 1e-12 * g.length {
            return Err(FsiError::Precondition("geometry and grid lengths differ".into()));
        }
        let face: Vec<GeomSample> = (0..=g.nx).map(|i| gm.at(g.x_face(i))).collect();
        let center: Vec<GeomSample> = (0..g.nx).map(|i| gm.at(g.x_center(i))).collect();
        let margin = face
            .iter()
            .chain(&center)
            .fold(f64::INFINITY, |m, s| m.min(1.0 + s.tilde));
        if !(margin > 0.0) {
            return Err(FsiError::Collision { margin, threshold: 0.0 });
        }
        Ok(Self { face, center })
    }
}

fn check_vel(g: &FluidGrid, u: &[f64]) -> Result<()> {
    check_len("velocity", g.nvel(), u.len())
}

/// `w = -eta~ u1 e1 + z eta~_x u1 e2`.
pub fn eval_w(g: &FluidGrid, gm: &GeometryMap, u: &[f64]) -> Result<Vec<f64>> {
    check_vel(g, u)?;
    let cols = Columns::new(g, gm)?;
    let mut w = vec![0.0; g.nvel()];
    for j in 0..g.nz {
        for i in 0..=g.nx {
            w[g.u1(i, j)] = -cols.face[i].tilde * u[g.u1(i, j)];
        }
    }
    for j in 0..=g.nz {
        for i in 0..g.nx {
            let s = &cols.center[i];
            let z = s.j0() * g.z_face(j);
            w[g.u2(i, j)] = z * s.tilde_x * u1_at_hf(g, u, i, j);
        }
    }
    Ok(w)
}

/// `N = (-eta~ u1 / (1 + eta~), z eta~_x u1 / (1 + eta~))`.
pub fn eval_n(g: &FluidGrid, gm: &GeometryMap, u: &[f64]) -> Result<Vec<f64>> {
    check_vel(g, u)?;
    let cols = Columns::new(g, gm)?;
    let mut n = vec![0.0; g.nvel()];
    for j in 0..g.nz {
        for i in 0..=g.nx {
            let t = cols.face[i].tilde;
            n[g.u1(i, j)] = -t * u[g.u1(i, j)] / (1.0 + t);
        }
    }
    for j in 0..=g.nz {
        for i in 0..g.nx {
            let s = &cols.center[i];
            let z = s.j0() * g.z_face(j);
            n[g.u2(i, j)] = z * s.tilde_x * u1_at_hf(g, u, i, j) / (1.0 + s.tilde);
        }
    }
    Ok(n)
}

/// `M = u + N`.
pub fn eval_m(g: &FluidGrid, gm: &GeometryMap, u: &[f64]) -> Result<Vec<f64>> {
    let n = eval_n(g, gm, u)?;
    Ok(u.iter().zip(&n).map(|(a, b)| a + b).collect())
}

/// The groups of `G`, each a face field with zero wall rows.
#[derive(Debug, Clone, PartialEq)]
pub struct GTerms {
    /// `-eta~ u_t`.
    pub time: Vec<f64>,
    /// `[z eta~_t + nu z (eta~_x^2 / (1 + eta~) - eta~_xx)] u_z`.
    pub drift: Vec<f64>,
    /// `nu [-2 z eta~_x u_xz + eta~ u_xx + (z^2 eta~_x^2 - eta~) / (1 + eta~) u_zz]`.
    pub viscous: Vec<f64>,
    /// `z (eta~_x p_z - eta~ p_x) e1`.
    pub pressure: Vec<f64>,
    /// `-(1 + eta~) u1 u_x + (z eta~_x u1 - u2) u_z`.
    pub convection: Vec<f64>,
}

impl GTerms {
    pub fn total(&self) -> Vec<f64> {
        (0..self.time.len())
            .map(|k| self.time[k] + self.drift[k] + self.viscous[k] + self.pressure[k] + self.convection[k])
            .collect()
    }
}

struct Point {
    s: GeomSample,
    z: f64,
    u1: f64,
    u2: f64,
    d: Derivs,
    ut: f64,
}

fn groups(p: &Point, nu: f64) -> [f64; 4] {
    let (s, z, d) = (&p.s, p.z, &p.d);
    let t = s.tilde;
    let tx = s.tilde_x;
    [
        -t * p.ut,
        (z * s.tilde_t + nu * z * (tx * tx / (1.0 + t) - s.tilde_xx)) * d.z,
        nu * (-2.0 * z * tx * d.xz + t * d.xx + (z * z * tx * tx - t) / (1.0 + t) * d.zz),
        -(1.0 + t) * p.u1 * d.x + (z * tx * p.u1 - p.u2) * d.z,
    ]
}

/// Term groups of `G(u, p, eta)` at the momentum faces. `u_prev` is the
/// same field one level earlier, for the backward difference `u_t`.
/// The pressure group is not evaluated on the inlet/outlet faces, where
/// the clamped geometry makes its coefficient vanish.
#[allow(clippy::too_many_arguments)]
pub fn g_terms(
    ops: &Operators,
    gm: &GeometryMap,
    u: &[f64],
    u_prev: &[f64],
    p: &[f64],
    dt: f64,
    nu: f64,
) -> Result<GTerms> {
    let g = &ops.grid;
    let m = &ops.metric;
    check_vel(g, u)?;
    check_vel(g, u_prev)?;
    check_len("pressure", g.ncell(), p.len())?;
    if !(dt > 0.0) {
        return Err(FsiError::Precondition(format!("time step must be positive, got {dt}")));
    }
    let cols = Columns::new(g, gm)?;
    let n = g.nvel();
    let mut out = GTerms {
        time: vec![0.0; n],
        drift: vec![0.0; n],
        viscous: vec![0.0; n],
        pressure: vec![0.0; n],
        convection: vec![0.0; n],
    };
    let store = |k: usize, v: [f64; 4], out: &mut GTerms| {
        out.time[k] = v[0];
        out.drift[k] = v[1];
        out.viscous[k] = v[2];
        out.convection[k] = v[3];
    };
    for j in 0..g.nz {
        let zp = g.z_center(j);
        for i in 0..=g.nx {
            let k = g.u1(i, j);
            let s = cols.face[i];
            let z = m.j_f[i] * zp;
            let pt = Point {
                s,
                z,
                u1: u[k],
                u2: u2_at_vf(g, u, i, j),
                d: u1_flat(g, u, i, j).to_reference(m.j_f[i], m.a_f[i], m.ax_f[i], zp),
                ut: (u[k] - u_prev[k]) / dt,
            };
            store(k, groups(&pt, nu), &mut out);
            if i > 0 && i < g.nx {
                let (px, pz) = p_flat_at_vf(g, p, i, j);
                let px = px - m.a_f[i] * zp * pz;
                let pz = pz / m.j_f[i];
                out.pressure[k] = z * (s.tilde_x * pz - s.tilde * px);
            }
        }
    }
    for j in 1..g.nz {
        let zp = g.z_face(j);
        for i in 0..g.nx {
            let k = g.u2(i, j);
            let pt = Point {
                s: cols.center[i],
                z: m.j_c[i] * zp,
                u1: u1_at_hf(g, u, i, j),
                u2: u[k],
                d: u2_flat(g, u, i, j).to_reference(m.j_c[i], m.a_c[i], m.ax_c[i], zp),
                ut: (u[k] - u_prev[k]) / dt,
            };
            store(k, groups(&pt, nu), &mut out);
        }
    }
    Ok(out)
}

pub fn eval_g(
    ops: &Operators,
    gm: &GeometryMap,
    u: &[f64],
    u_prev: &[f64],
    p: &[f64],
    dt: f64,
    nu: f64,
) -> Result<Vec<f64>> {
    Ok(g_terms(ops, gm, u, u_prev, p, dt, nu)?.total())
}

/// `Psi(u, eta)` on the top faces.
pub fn psi_faces(ops: &Operators, gm: &GeometryMap, u: &[f64], nu: f64) -> Result<Vec<f64>> {
    let g = &ops.grid;
    let m = &ops.metric;
    check_vel(g, u)?;
    let cols = Columns::new(g, gm)?;
    Ok((0..g.nx)
        .map(|i| {
            let s = &cols.center[i];
            let j = m.j_c[i];
            let (u1z, _, u2x, u2z) = top_traces(g, u, i);
            let u1z = u1z / j;
            let u2x = u2x - m.a_c[i] * u2z;
            let u2z = u2z / j;
            let (t, ex, z) = (s.tilde, s.eta_x, j);
            nu * (ex / (1.0 + t) * u1z + ex * u2x - (z * s.tilde_x * ex - 2.0) / (1.0 + t) * u2z)
        })
        .collect())
}

/// `Psi(u, eta)` transferred to beam nodes.
pub fn eval_psi(ops: &Operators, tr: &Transfer, gm: &GeometryMap, u: &[f64], nu: f64) -> Result<Vec<f64>> {
    tr.beam(&psi_faces(ops, gm, u, nu)?)
}

/// `H = Psi(M(u), eta)` on beam nodes.
pub fn eval_h(ops: &Operators, tr: &Transfer, gm: &GeometryMap, u: &[f64], nu: f64) -> Result<Vec<f64>> {
    eval_psi(ops, tr, gm, &eval_m(&ops.grid, gm, u)?, nu)
}

/// `Theta = -|u|^2 / 2` on the inlet and outlet faces, `(left, right)`.
pub fn eval_theta(g: &FluidGrid, u: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    check_vel(g, u)?;
    let side = |i: usize| -> Vec<f64> {
        (0..g.nz)
            .map(|j| {
                let a = u[g.u1(i, j)];
                let b = u2_at_vf(g, u, i, j);
                -0.5 * (a * a + b * b)
            })
            .collect()
    };
    Ok((side(0), side(g.nx)))
}

/// One time level of the transformed body force:
/// `F = G(M(u), p, eta) - (N(u) - N(u_prev)) / dt + nu Lap N(u)`.
#[derive(Debug, Clone, Copy)]
pub struct Level<'a> {
    pub gm: &'a GeometryMap,
    pub u: &'a [f64],
}

pub fn eval_f(
    ops: &Operators,
    now: Level<'_>,
    prev: Level<'_>,
    p: &[f64],
    dt: f64,
    nu: f64,
) -> Result<Vec<f64>> {
    let g = &ops.grid;
    let n_now = eval_n(g, now.gm, now.u)?;
    let n_prev = eval_n(g, prev.gm, prev.u)?;
    let m_now: Vec<f64> = now.u.iter().zip(&n_now).map(|(a, b)| a + b).collect();
    let m_prev: Vec<f64> = prev.u.iter().zip(&n_prev).map(|(a, b)| a + b).collect();
    let mut f = eval_g(ops, now.gm, &m_now, &m_prev, p, dt, nu)?;
    let lap = ops.lap.matvec(&n_now);
    for k in 0..g.nvel() {
        if g.is_wall_face(k) {
            f[k] = 0.0;
        } else {
            f[k] += -(n_now[k] - n_prev[k]) / dt + nu * lap[k];
        }
    }
    Ok(f)
}
