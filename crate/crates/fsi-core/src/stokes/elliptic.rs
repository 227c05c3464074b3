//! Scalar elliptic problems `div (grad phi) = s` on the cells, with
//! Dirichlet data on the inlet/outlet and either Dirichlet data or a flux on
//! the walls. The discrete operator is `div o Pinv o grad`, so a potential
//! solved here produces a flux with exactly the requested divergence.

use super::ops::{Operators, WallBc};
use crate::error::{check_len, Result};
use crate::linalg::{Csr, Krylov, LinearSolver, SolverOptions};

pub struct EllipticSolver {
    pub wall: WallBc,
    /// `L = div Pinv G` on cell unknowns.
    pub op: Csr,
    /// Contribution of Dirichlet boundary values.
    pub data_op: Csr,
    /// Contribution of outward wall fluxes `[bottom, top]` (Neumann case).
    pub flux_op: Csr,
    solver: LinearSolver,
}

impl EllipticSolver {
    pub fn new(ops: &Operators, wall: WallBc, opts: SolverOptions) -> Result<Self> {
        let (g, gd) = match wall {
            WallBc::Neumann => (&ops.grad_n, &ops.grad_n_data),
            WallBc::Dirichlet => (&ops.grad_d, &ops.grad_d_data),
        };
        let op = ops.div.matmul(&ops.pinv.matmul(g));
        let data_op = ops.div.matmul(&ops.pinv.matmul(gd));
        let flux_op = match wall {
            WallBc::Neumann => ops.wall_flux.clone(),
            WallBc::Dirichlet => Csr::zeros(ops.grid.ncell(), 2 * ops.grid.nx),
        };
        // -L is symmetric positive definite.
        let neg = op.scale(-1.0);
        let method = Krylov::Cg;
        let context = match wall {
            WallBc::Neumann => "mixed elliptic solve",
            WallBc::Dirichlet => "dirichlet elliptic solve",
        };
        let solver = LinearSolver::new(neg, ops.grid.ncell(), method, None, opts, context)?;
        Ok(Self {
            wall,
            op,
            data_op,
            flux_op,
            solver,
        })
    }

    /// Solves `L phi = source - data_op bv - flux_op flux`.
    pub fn solve(&self, source: &[f64], bv: Option<&[f64]>, flux: Option<&[f64]>) -> Result<Vec<f64>> {
        let n = self.op.nrows;
        check_len("elliptic source", n, source.len())?;
        let mut rhs: Vec<f64> = source.iter().map(|v| -v).collect();
        if let Some(d) = bv {
            check_len("elliptic boundary data", self.data_op.ncols, d.len())?;
            self.data_op.matvec_add(d, 1.0, &mut rhs);
        }
        if let Some(q) = flux {
            check_len("elliptic wall flux", self.flux_op.ncols, q.len())?;
            self.flux_op.matvec_add(q, 1.0, &mut rhs);
        }
        self.solver.solve(&rhs)
    }

    pub fn is_direct(&self) -> bool {
        self.solver.is_direct()
    }
}
