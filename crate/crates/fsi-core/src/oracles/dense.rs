//! Dense reference computations, assembled from scratch on the flat grid.

use crate::beam::BeamParams;
use crate::error::{check_len, FsiError, Result};
use crate::stokes::FluidGrid;
use nalgebra::{DMatrix, DVector};

pub const MAX_ORACLE_CELLS: usize = 32 * 32;

fn vf(g: &FluidGrid, i: usize, j: usize) -> usize {
    j * (g.nx + 1) + i
}

fn hf(g: &FluidGrid, i: usize, j: usize) -> usize {
    (g.nx + 1) * g.nz + j * g.nx + i
}

/// Minimizes `||v - u||` in the face-weighted L2 norm subject to zero
/// discrete divergence in every cell and zero normal velocity on the top and
/// bottom walls, by a dense KKT factorization.
pub fn dense_projection(grid: &FluidGrid, u: &[f64]) -> Result<Vec<f64>> {
    DenseProjector::new(grid)?.project(u)
}

/// The factorized KKT matrix of [`dense_projection`], reusable across fields.
pub struct DenseProjector {
    grid: FluidGrid,
    free: Vec<usize>,
    weight: Vec<f64>,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl DenseProjector {
    pub fn new(grid: &FluidGrid) -> Result<Self> {
        let g = grid;
        if g.nx * g.nz > MAX_ORACLE_CELLS {
            return Err(FsiError::Precondition(format!(
                "dense oracle limited to {MAX_ORACLE_CELLS} cells, grid has {}",
                g.nx * g.nz
            )));
        }
        let nvel = (g.nx + 1) * g.nz + g.nx * (g.nz + 1);
        // free unknowns: every face except the walls
        let mut free = Vec::new();
        let mut weight = Vec::new();
        for j in 0..g.nz {
            for i in 0..=g.nx {
                free.push(vf(g, i, j));
                weight.push(if i == 0 || i == g.nx { 0.5 } else { 1.0 });
            }
        }
        for j in 1..g.nz {
            for i in 0..g.nx {
                free.push(hf(g, i, j));
                weight.push(1.0);
            }
        }
        let nf = free.len();
        let nc = g.nx * g.nz;
        let mut pos = vec![usize::MAX; nvel];
        for (k, &f) in free.iter().enumerate() {
            pos[f] = k;
        }
        let mut k = DMatrix::<f64>::zeros(nf + nc, nf + nc);
        for (a, w) in weight.iter().enumerate() {
            k[(a, a)] = *w;
        }
        for j in 0..g.nz {
            for i in 0..g.nx {
                let r = nf + j * g.nx + i;
                let terms = [
                    (vf(g, i + 1, j), 1.0 / g.hx),
                    (vf(g, i, j), -1.0 / g.hx),
                    (hf(g, i, j + 1), 1.0 / g.hz),
                    (hf(g, i, j), -1.0 / g.hz),
                ];
                for (f, c) in terms {
                    if pos[f] != usize::MAX {
                        k[(r, pos[f])] = c;
                        k[(pos[f], r)] = c;
                    }
                }
            }
        }
        Ok(Self {
            grid: *g,
            free,
            weight,
            lu: k.lu(),
        })
    }

    pub fn project(&self, u: &[f64]) -> Result<Vec<f64>> {
        let g = &self.grid;
        let nvel = (g.nx + 1) * g.nz + g.nx * (g.nz + 1);
        check_len("velocity", nvel, u.len())?;
        let nf = self.free.len();
        let mut rhs = DVector::<f64>::zeros(nf + g.nx * g.nz);
        for (a, &f) in self.free.iter().enumerate() {
            rhs[a] = self.weight[a] * u[f];
        }
        let sol = self.lu.solve(&rhs).ok_or_else(|| FsiError::Solver {
            context: "dense projection".into(),
            residual: f64::NAN,
            iterations: 0,
        })?;
        let mut v = vec![0.0; nvel];
        for (a, &f) in self.free.iter().enumerate() {
            v[f] = sol[a];
        }
        Ok(v)
    }
}

/// Dense `-(beta d_xx - alpha d_xxxx)` on the interior nodes of a clamped
/// beam, built directly from the stencil with the clamped ghost rule.
pub fn dense_beam_stiffness(params: &BeamParams) -> DMatrix<f64> {
    let n = params.nodes;
    let m = n - 2;
    let h = params.h();
    let mut k = DMatrix::zeros(m, m);
    let mut add = |row: usize, node: isize, v: f64| {
        // ghost of node -1 is node 1; ghost of node n is node n-2
        let node = if node < 0 {
            -node
        } else if node > n as isize - 1 {
            2 * (n as isize - 1) - node
        } else {
            node
        } as usize;
        if node >= 1 && node <= n - 2 {
            k[(row, node - 1)] += v;
        }
    };
    for r in 0..m {
        let c = (r + 1) as isize;
        let a = params.alpha / h.powi(4);
        let b = params.beta / (h * h);
        add(r, c - 2, a);
        add(r, c - 1, -4.0 * a - b);
        add(r, c, 6.0 * a + 2.0 * b);
        add(r, c + 1, -4.0 * a - b);
        add(r, c + 2, a);
    }
    k
}

/// Lowest angular frequency from a dense symmetric eigen-decomposition.
pub fn dense_beam_frequency(params: &BeamParams) -> f64 {
    let k = dense_beam_stiffness(params);
    let ev = k.symmetric_eigen().eigenvalues;
    ev.min().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_fixes_solenoidal_field() {
        let g = FluidGrid::new(8, 8, 1.0).unwrap();
        // u1 = const in the interior with zero wall flux is divergence free
        let mut u = vec![0.0; (g.nx + 1) * g.nz + g.nx * (g.nz + 1)];
        for j in 0..g.nz {
            for i in 0..=g.nx {
                u[vf(&g, i, j)] = 1.0 + j as f64;
            }
        }
        let v = dense_projection(&g, &u).unwrap();
        for (a, b) in u.iter().zip(&v) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
