//! Convection on the flattened reference grid, from shifted samples of
//! analytic fields. Only interior faces (two cells away from every boundary)
//! are filled; the rest are `None`.

use crate::geometry::BeamProfile;
use crate::stokes::FluidGrid;

/// `(f, f_x, f_z)` in physical derivatives at flattened point `(x, zp)`.
fn derivs(g: &FluidGrid, profile: &BeamProfile, f: &dyn Fn(f64, f64) -> f64, x: f64, zp: f64) -> (f64, f64, f64) {
    let (hx, hz) = (g.hx, g.hz);
    let fx = (f(x + hx, zp) - f(x - hx, zp)) / (2.0 * hx);
    let fz = (f(x, zp + hz) - f(x, zp - hz)) / (2.0 * hz);
    let jac = 1.0 + profile.at(x);
    let a = profile.dx_at(x) / jac;
    (f(x, zp), fx - a * zp * fz, fz / jac)
}

fn avg4(f: &dyn Fn(f64, f64) -> f64, x: f64, z: f64, hx: f64, hz: f64) -> f64 {
    0.25 * (f(x - 0.5 * hx, z - 0.5 * hz) + f(x + 0.5 * hx, z - 0.5 * hz) + f(x - 0.5 * hx, z + 0.5 * hz) + f(x + 0.5 * hx, z + 0.5 * hz))
}

/// `-(u . grad) u` with `u1 = a(x, z')` on vertical faces and `u2 = b(x, z')`
/// on horizontal faces, the cross component averaged over the four nearest
/// faces of the other family.
pub fn plain_convection(
    g: &FluidGrid,
    profile: &BeamProfile,
    a: &dyn Fn(f64, f64) -> f64,
    b: &dyn Fn(f64, f64) -> f64,
) -> Vec<Option<f64>> {
    let mut out = vec![None; g.nvel()];
    for j in 1..g.nz - 1 {
        for i in 1..g.nx {
            let (x, zp) = (g.x_face(i), g.z_center(j));
            let (v, dx, dz) = derivs(g, profile, a, x, zp);
            out[g.u1(i, j)] = Some(-v * dx - avg4(b, x, zp, g.hx, g.hz) * dz);
        }
    }
    for j in 2..g.nz - 1 {
        for i in 1..g.nx - 1 {
            let (x, zp) = (g.x_center(i), g.z_face(j));
            let (v, dx, dz) = derivs(g, profile, b, x, zp);
            out[g.u2(i, j)] = Some(-avg4(a, x, zp, g.hx, g.hz) * dx - v * dz);
        }
    }
    out
}
