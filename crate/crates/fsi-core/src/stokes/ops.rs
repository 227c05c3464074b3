//! Sparse staggered operators on the flattened grid.
//!
//! Velocities are stored as reference-domain Cartesian components. The flux
//! `V = Pinv u` (contravariant Piola transform of the flattening) is what the
//! divergence acts on, so `div' V = 0` is the discrete incompressibility.
//!
//! Ghost conventions: `u1` is odd across top and bottom (no slip) and even
//! across the inlet/outlet; `u2` is odd across the inlet/outlet. Pressure-like
//! scalars get Dirichlet ghosts `2 theta - p` on the inlet/outlet and either
//! Dirichlet ghosts or a Neumann flux on top and bottom.

use super::grid::{laplacian_coeffs, FluidGrid, Metric};
use crate::linalg::{Csr, TripletBuilder};

/// Treatment of scalar potentials on the top and bottom walls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallBc {
    Neumann,
    Dirichlet,
}

/// Index helpers for scalar boundary data: `[left (nz), right (nz), bottom (nx), top (nx)]`.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryLayout {
    nx: usize,
    nz: usize,
}

impl BoundaryLayout {
    pub fn new(grid: &FluidGrid) -> Self {
        Self { nx: grid.nx, nz: grid.nz }
    }
    pub fn len(&self) -> usize {
        2 * (self.nx + self.nz)
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn left(&self, j: usize) -> usize {
        j
    }
    pub fn right(&self, j: usize) -> usize {
        self.nz + j
    }
    pub fn bottom(&self, i: usize) -> usize {
        2 * self.nz + i
    }
    pub fn top(&self, i: usize) -> usize {
        2 * self.nz + self.nx + i
    }

    /// Packs inlet/outlet values; top and bottom entries are zero.
    pub fn sides(&self, left: &[f64], right: &[f64]) -> Vec<f64> {
        let mut d = vec![0.0; self.len()];
        d[..self.nz].copy_from_slice(left);
        d[self.nz..2 * self.nz].copy_from_slice(right);
        d
    }
}

#[derive(Clone, Copy)]
enum Col {
    Cell(usize),
    Data(usize),
}

/// Cell value `p(ii, j)` for `ii` in `-1..=nx`, with side ghosts `2 theta - p`.
fn cell_value(g: &FluidGrid, b: &BoundaryLayout, ii: isize, j: usize) -> Vec<(Col, f64)> {
    if ii < 0 {
        vec![(Col::Data(b.left(j)), 2.0), (Col::Cell(g.cell(0, j)), -1.0)]
    } else if ii as usize >= g.nx {
        vec![(Col::Data(b.right(j)), 2.0), (Col::Cell(g.cell(g.nx - 1, j)), -1.0)]
    } else {
        vec![(Col::Cell(g.cell(ii as usize, j)), 1.0)]
    }
}

/// Reference-domain gradient of a cell scalar onto the velocity faces.
/// Returns `(G, G_data)` with `grad p = G p + G_data theta`.
/// Wall rows are empty for `WallBc::Neumann`.
pub fn gradient(grid: &FluidGrid, metric: &Metric, wall: WallBc) -> (Csr, Csr) {
    let g = grid;
    let b = BoundaryLayout::new(g);
    let mut tc = TripletBuilder::new(g.nvel(), g.ncell());
    let mut td = TripletBuilder::new(g.nvel(), b.len());
    let push = |row: usize, terms: Vec<(Col, f64)>, s: f64, tc: &mut TripletBuilder, td: &mut TripletBuilder| {
        for (c, v) in terms {
            match c {
                Col::Cell(k) => tc.push(row, k, s * v),
                Col::Data(k) => td.push(row, k, s * v),
            }
        }
    };
    for j in 0..g.nz {
        for i in 0..=g.nx {
            let row = g.u1(i, j);
            push(row, cell_value(g, &b, i as isize, j), 1.0 / g.hx, &mut tc, &mut td);
            push(row, cell_value(g, &b, i as isize - 1, j), -1.0 / g.hx, &mut tc, &mut td);
            if metric.flat {
                continue;
            }
            // adjoint of the cross term of `piola_inverse` in the J-weighted
            // face inner product, so that `div Pinv G` is symmetric; the
            // inlet/outlet faces carry half a control volume
            let w = if i == 0 || i == g.nx { 2.0 } else { 1.0 };
            for ic in [i as isize - 1, i as isize] {
                if ic < 0 || ic as usize >= g.nx {
                    continue;
                }
                let ic = ic as usize;
                for je in [j, j + 1] {
                    if je == 0 || je >= g.nz {
                        continue;
                    }
                    let c = -w * g.z_face(je) * metric.ex_c[ic] / (4.0 * metric.j_c[ic] * g.hz);
                    tc.push(row, g.cell(ic, je), c);
                    tc.push(row, g.cell(ic, je - 1), -c);
                }
            }
        }
    }
    for i in 0..g.nx {
        let s = 1.0 / (g.hz * metric.j_c[i]);
        for j in 1..g.nz {
            let row = g.u2(i, j);
            tc.push(row, g.cell(i, j), s);
            tc.push(row, g.cell(i, j - 1), -s);
        }
        if wall == WallBc::Dirichlet {
            let rb = g.u2(i, 0);
            tc.push(rb, g.cell(i, 0), 2.0 * s);
            td.push(rb, b.bottom(i), -2.0 * s);
            let rt = g.u2(i, g.nz);
            td.push(rt, b.top(i), 2.0 * s);
            tc.push(rt, g.cell(i, g.nz - 1), -2.0 * s);
        }
    }
    (tc.build(), td.build())
}

/// Flux divergence `div' V` at cell centers (`ncell x nvel`).
pub fn divergence(grid: &FluidGrid) -> Csr {
    let g = grid;
    let mut t = TripletBuilder::new(g.ncell(), g.nvel());
    for j in 0..g.nz {
        for i in 0..g.nx {
            let r = g.cell(i, j);
            t.push(r, g.u1(i + 1, j), 1.0 / g.hx);
            t.push(r, g.u1(i, j), -1.0 / g.hx);
            t.push(r, g.u2(i, j + 1), 1.0 / g.hz);
            t.push(r, g.u2(i, j), -1.0 / g.hz);
        }
    }
    t.build()
}

/// Injection of outward wall fluxes `[bottom (nx), top (nx)]` into the divergence.
pub fn wall_flux_injection(grid: &FluidGrid) -> Csr {
    let g = grid;
    let mut t = TripletBuilder::new(g.ncell(), 2 * g.nx);
    for i in 0..g.nx {
        t.push(g.cell(i, 0), i, 1.0 / g.hz);
        t.push(g.cell(i, g.nz - 1), g.nx + i, 1.0 / g.hz);
    }
    t.build()
}

/// Terms of `sum (J u1) / (4 J_c)` over the four vertical faces around an
/// interior horizontal face, as `(index, weight)` acting on `J u1`.
fn hf_average(g: &FluidGrid, i: usize, j: usize) -> [(usize, usize); 4] {
    [
        (g.u1(i, j - 1), i),
        (g.u1(i + 1, j - 1), i + 1),
        (g.u1(i, j), i),
        (g.u1(i + 1, j), i + 1),
    ]
}

/// Physical velocity to flux: `V1 = J u1`, `V2 = u2 - z' eta0_x u1~`.
pub fn piola_inverse(grid: &FluidGrid, metric: &Metric) -> Csr {
    let g = grid;
    if metric.flat {
        return Csr::identity(g.nvel());
    }
    let mut t = TripletBuilder::new(g.nvel(), g.nvel());
    for j in 0..g.nz {
        for i in 0..=g.nx {
            t.push(g.u1(i, j), g.u1(i, j), metric.j_f[i]);
        }
    }
    for j in 0..=g.nz {
        let z = g.z_face(j);
        for i in 0..g.nx {
            let r = g.u2(i, j);
            t.push(r, r, 1.0);
            if j == 0 || j == g.nz {
                continue;
            }
            let c = -z * metric.ex_c[i] / (4.0 * metric.j_c[i]);
            for (k, ii) in hf_average(g, i, j) {
                t.push(r, k, c * metric.j_f[ii]);
            }
        }
    }
    t.build()
}

/// Flux to physical velocity, the exact inverse of [`piola_inverse`].
pub fn piola(grid: &FluidGrid, metric: &Metric) -> Csr {
    let g = grid;
    if metric.flat {
        return Csr::identity(g.nvel());
    }
    let mut t = TripletBuilder::new(g.nvel(), g.nvel());
    for j in 0..g.nz {
        for i in 0..=g.nx {
            t.push(g.u1(i, j), g.u1(i, j), 1.0 / metric.j_f[i]);
        }
    }
    for j in 0..=g.nz {
        let z = g.z_face(j);
        for i in 0..g.nx {
            let r = g.u2(i, j);
            t.push(r, r, 1.0);
            if j == 0 || j == g.nz {
                continue;
            }
            let c = z * metric.ex_c[i] / (4.0 * metric.j_c[i]);
            for (k, _) in hf_average(g, i, j) {
                t.push(r, k, c);
            }
        }
    }
    t.build()
}

/// Resolves `u1(i, j)` with ghosts; returns `(index, sign)`.
pub(crate) fn u1_at(g: &FluidGrid, i: isize, j: isize) -> (usize, f64) {
    let nx = g.nx as isize;
    let nz = g.nz as isize;
    let ii = if i < 0 {
        -i
    } else if i > nx {
        2 * nx - i
    } else {
        i
    };
    let (jj, s) = if j < 0 {
        (-1 - j, -1.0)
    } else if j >= nz {
        (2 * nz - 1 - j, -1.0)
    } else {
        (j, 1.0)
    };
    (g.u1(ii as usize, jj as usize), s)
}

pub(crate) fn u2_at(g: &FluidGrid, i: isize, j: isize) -> (usize, f64) {
    let nx = g.nx as isize;
    let (ii, s) = if i < 0 {
        (-1 - i, -1.0)
    } else if i >= nx {
        (2 * nx - 1 - i, -1.0)
    } else {
        (i, 1.0)
    };
    (g.u2(ii as usize, j as usize), s)
}

fn push_stencil(
    t: &mut TripletBuilder,
    row: usize,
    at: &dyn Fn(isize, isize) -> (usize, f64),
    i: isize,
    j: isize,
    hx: f64,
    hz: f64,
    (cxz, czz, cz): (f64, f64, f64),
) {
    let mut add = |di: isize, dj: isize, c: f64| {
        if c != 0.0 {
            let (k, s) = at(i + di, j + dj);
            t.push(row, k, s * c);
        }
    };
    let ix2 = 1.0 / (hx * hx);
    let iz2 = 1.0 / (hz * hz);
    add(1, 0, ix2);
    add(-1, 0, ix2);
    add(0, 0, -2.0 * ix2 - 2.0 * czz * iz2);
    add(0, 1, czz * iz2 + cz * 0.5 / hz);
    add(0, -1, czz * iz2 - cz * 0.5 / hz);
    let m = cxz * 0.25 / (hx * hz);
    add(1, 1, m);
    add(-1, -1, m);
    add(1, -1, -m);
    add(-1, 1, -m);
}

/// Componentwise reference-domain Laplacian. Rows exist for every vertical
/// face and every interior horizontal face; wall rows are empty.
pub fn vector_laplacian(grid: &FluidGrid, metric: &Metric) -> Csr {
    let g = grid;
    let mut t = TripletBuilder::new(g.nvel(), g.nvel());
    let a1 = |i: isize, j: isize| u1_at(g, i, j);
    let a2 = |i: isize, j: isize| u2_at(g, i, j);
    for j in 0..g.nz {
        let z = g.z_center(j);
        for i in 0..=g.nx {
            let c = laplacian_coeffs(metric.j_f[i], metric.a_f[i], metric.ax_f[i], z);
            push_stencil(&mut t, g.u1(i, j), &a1, i as isize, j as isize, g.hx, g.hz, c);
        }
    }
    for j in 1..g.nz {
        let z = g.z_face(j);
        for i in 0..g.nx {
            let c = laplacian_coeffs(metric.j_c[i], metric.a_c[i], metric.ax_c[i], z);
            push_stencil(&mut t, g.u2(i, j), &a2, i as isize, j as isize, g.hx, g.hz, c);
        }
    }
    t.build()
}

/// Assembled operators for one grid and reference profile.
#[derive(Debug, Clone)]
pub struct Operators {
    pub grid: FluidGrid,
    pub metric: Metric,
    pub pinv: Csr,
    pub piola: Csr,
    /// Flux divergence.
    pub div: Csr,
    /// `div o Pinv`, acting on physical velocities.
    pub div_u: Csr,
    pub lap: Csr,
    pub grad_n: Csr,
    pub grad_n_data: Csr,
    pub grad_d: Csr,
    pub grad_d_data: Csr,
    pub wall_flux: Csr,
}

impl Operators {
    pub fn new(grid: &FluidGrid, metric: &Metric) -> Self {
        let pinv = piola_inverse(grid, metric);
        let div = divergence(grid);
        let div_u = div.matmul(&pinv);
        let (grad_n, grad_n_data) = gradient(grid, metric, WallBc::Neumann);
        let (grad_d, grad_d_data) = gradient(grid, metric, WallBc::Dirichlet);
        Self {
            grid: *grid,
            metric: metric.clone(),
            piola: piola(grid, metric),
            pinv,
            div_u,
            div,
            lap: vector_laplacian(grid, metric),
            grad_n,
            grad_n_data,
            grad_d,
            grad_d_data,
            wall_flux: wall_flux_injection(grid),
        }
    }

    pub fn layout(&self) -> BoundaryLayout {
        BoundaryLayout::new(&self.grid)
    }

    /// Outward wall fluxes `[bottom, top]` of a physical velocity field.
    pub fn wall_fluxes(&self, u: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let v = self.pinv.matvec(u);
        let mut q = vec![0.0; 2 * g.nx];
        for i in 0..g.nx {
            q[i] = -v[g.u2(i, 0)];
            q[g.nx + i] = v[g.u2(i, g.nz)];
        }
        q
    }

    /// Max-norm of the flux divergence of a physical velocity.
    pub fn max_divergence(&self, u: &[f64]) -> f64 {
        crate::linalg::norm_inf(&self.div_u.matvec(u))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BeamProfile;

    fn ops(mode_graph: bool) -> Operators {
        let g = FluidGrid::new(16, 12, 1.0).unwrap();
        let p = if mode_graph {
            BeamProfile::bump(17, 1.0, 0.3).unwrap()
        } else {
            BeamProfile::zero(17, 1.0).unwrap()
        };
        Operators::new(&g, &Metric::new(&g, &p).unwrap())
    }

    #[test]
    fn piola_pair_is_inverse() {
        let o = ops(true);
        let n = o.grid.nvel();
        let x: Vec<f64> = (0..n).map(|k| ((k * 37) % 11) as f64 - 5.0).collect();
        let y = o.piola.matvec(&o.pinv.matvec(&x));
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn laplacian_exact_on_quadratics_rect() {
        let o = ops(false);
        let g = o.grid;
        // u1 = z(1-z) satisfies both ghost rules; Laplacian = -2.
        let mut u = vec![0.0; g.nvel()];
        for j in 0..g.nz {
            for i in 0..=g.nx {
                let z = g.z_center(j);
                u[g.u1(i, j)] = z * (1.0 - z);
            }
        }
        let l = o.lap.matvec(&u);
        // the odd wall reflection is only locally first order
        for j in 1..g.nz - 1 {
            for i in 0..=g.nx {
                assert!((l[g.u1(i, j)] + 2.0).abs() < 1e-9, "{i} {j} {}", l[g.u1(i, j)]);
            }
        }
    }

    #[test]
    fn gradient_of_linear_pressure() {
        let o = ops(false);
        let g = o.grid;
        let b = o.layout();
        let p: Vec<f64> = (0..g.ncell()).map(|k| 3.0 * g.x_center(k % g.nx)).collect();
        let theta = b.sides(&vec![0.0; g.nz], &vec![3.0; g.nz]);
        let mut gp = o.grad_n.matvec(&p);
        o.grad_n_data.matvec_add(&theta, 1.0, &mut gp);
        for j in 0..g.nz {
            for i in 0..=g.nx {
                assert!((gp[g.u1(i, j)] - 3.0).abs() < 1e-12);
            }
        }
    }
}
