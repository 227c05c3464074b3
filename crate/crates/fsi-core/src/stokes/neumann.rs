//! Neumann-to-Dirichlet maps of harmonic potentials vanishing on the inlet
//! and outlet: the added-mass operator `N_s` and the wall-data map `N_0`.
//!
//! Wall data are outward fluxes through the flattened walls. The top trace of
//! a potential is taken half a cell above the top cell centers,
//! `phi_top = phi(i, nz-1) + hz/2 * J * q_top`, which keeps `N_s` symmetric
//! and second order.

use super::elliptic::EllipticSolver;
use super::ops::{Operators, WallBc};
use super::transfer::Transfer;
use crate::error::{check_len, Result};
use crate::linalg::SolverOptions;
use nalgebra::DMatrix;

pub struct NeumannMaps {
    ops: Operators,
    pub transfer: Transfer,
    solver: EllipticSolver,
}

impl NeumannMaps {
    pub fn new(ops: &Operators, beam_nodes: usize, opts: SolverOptions) -> Result<Self> {
        Ok(Self {
            ops: ops.clone(),
            transfer: Transfer::new(&ops.grid, beam_nodes)?,
            solver: EllipticSolver::new(ops, WallBc::Neumann, opts)?,
        })
    }

    pub fn solver(&self) -> &EllipticSolver {
        &self.solver
    }

    /// Top trace of a cell potential given its outward top flux.
    pub fn top_trace(&self, phi: &[f64], q_top: &[f64]) -> Vec<f64> {
        let g = &self.ops.grid;
        (0..g.nx)
            .map(|i| phi[g.cell(i, g.nz - 1)] + 0.5 * g.hz * self.ops.metric.j_c[i] * q_top[i])
            .collect()
    }

    /// Harmonic potential with wall fluxes `v = [bottom (nx), top (nx)]`,
    /// transferred to beam nodes.
    pub fn apply_n0(&self, v: &[f64]) -> Result<Vec<f64>> {
        let g = &self.ops.grid;
        check_len("wall data", 2 * g.nx, v.len())?;
        let rho = self.solver.solve(&vec![0.0; g.ncell()], None, Some(v))?;
        self.transfer.beam(&self.top_trace(&rho, &v[g.nx..]))
    }

    /// Dense added-mass matrix on beam nodes (end rows and columns zero).
    pub fn assemble_ns(&self) -> Result<DMatrix<f64>> {
        let nb = self.transfer.nodes;
        let g = &self.ops.grid;
        let mut m = DMatrix::zeros(nb, nb);
        let mut e = vec![0.0; nb];
        for j in 1..nb - 1 {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let mut v = vec![0.0; 2 * g.nx];
            v[g.nx..].copy_from_slice(&self.transfer.fluid(&e)?);
            let col = self.apply_n0(&v)?;
            for k in 0..nb {
                m[(k, j)] = col[k];
            }
        }
        Ok(m)
    }
}

/// `N_s` for a grid and beam resolution.
pub fn assemble_ns(ops: &Operators, beam_nodes: usize, opts: SolverOptions) -> Result<DMatrix<f64>> {
    NeumannMaps::new(ops, beam_nodes, opts)?.assemble_ns()
}

pub fn apply_n0(ops: &Operators, beam_nodes: usize, v: &[f64], opts: SolverOptions) -> Result<Vec<f64>> {
    NeumannMaps::new(ops, beam_nodes, opts)?.apply_n0(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BeamProfile;
    use crate::stokes::grid::{FluidGrid, Metric};

    #[test]
    fn ns_is_symmetric_and_nonnegative() {
        let g = FluidGrid::new(16, 16, 1.0).unwrap();
        for amp in [0.0, 0.2] {
            let m = Metric::new(&g, &BeamProfile::bump(17, 1.0, amp).unwrap()).unwrap();
            let ops = Operators::new(&g, &m);
            let m = assemble_ns(&ops, 17, SolverOptions::default()).unwrap();
            let asym = (&m - m.transpose()).norm() / m.norm();
            assert!(asym < 1e-10, "{amp}: {asym}");
            let ev = m.clone().symmetric_eigen().eigenvalues;
            assert!(ev.min() > -1e-10 * m.norm());
        }
    }
}
