//! Leray projector onto discretely divergence-free fields with zero normal
//! flux through the top and bottom walls.
//!
//! Two routes share one interface: the two-solve splitting
//! (`p_u` with Dirichlet data on the whole boundary, then the harmonic
//! correction `q_u`) and a single mixed solve. They agree to solver tolerance.

use super::elliptic::EllipticSolver;
use super::ops::{Operators, WallBc};
use crate::error::{check_len, Result};
use crate::linalg::SolverOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProjectionRoute {
    #[default]
    TwoSolve,
    Mixed,
}

#[derive(Debug, Clone)]
pub struct Projection {
    pub u: Vec<f64>,
    pub p_u: Vec<f64>,
    pub q_u: Vec<f64>,
}

pub struct Projector {
    ops: Operators,
    dirichlet: EllipticSolver,
    mixed: EllipticSolver,
    pub route: ProjectionRoute,
}

impl Projector {
    pub fn new(ops: &Operators, opts: SolverOptions) -> Result<Self> {
        Ok(Self {
            ops: ops.clone(),
            dirichlet: EllipticSolver::new(ops, WallBc::Dirichlet, opts)?,
            mixed: EllipticSolver::new(ops, WallBc::Neumann, opts)?,
            route: ProjectionRoute::TwoSolve,
        })
    }

    pub fn ops(&self) -> &Operators {
        &self.ops
    }

    pub fn mixed_solver(&self) -> &EllipticSolver {
        &self.mixed
    }

    pub fn project(&self, u: &[f64]) -> Result<Projection> {
        self.project_with(u, self.route)
    }

    pub fn project_with(&self, u: &[f64], route: ProjectionRoute) -> Result<Projection> {
        let g = &self.ops.grid;
        check_len("velocity", g.nvel(), u.len())?;
        let v = self.ops.pinv.matvec(u);
        let (p_u, w) = match route {
            ProjectionRoute::TwoSolve => {
                let p = self.dirichlet.solve(&self.ops.div.matvec(&v), None, None)?;
                let mut w = v;
                let gp = self.ops.pinv.matvec(&self.ops.grad_d.matvec(&p));
                crate::linalg::axpy(-1.0, &gp, &mut w);
                (p, w)
            }
            ProjectionRoute::Mixed => (vec![0.0; g.ncell()], v),
        };
        let mut flux = vec![0.0; 2 * g.nx];
        for i in 0..g.nx {
            flux[i] = -w[g.u2(i, 0)];
            flux[g.nx + i] = w[g.u2(i, g.nz)];
        }
        let q = self.mixed.solve(&self.ops.div.matvec(&w), None, Some(&flux))?;
        let gq = self.ops.pinv.matvec(&self.ops.grad_n.matvec(&q));
        let mut out = w;
        crate::linalg::axpy(-1.0, &gq, &mut out);
        for k in g.top_faces().into_iter().chain(g.bottom_faces()) {
            out[k] = 0.0;
        }
        Ok(Projection {
            u: self.ops.piola.matvec(&out),
            p_u,
            q_u: q,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stokes::grid::{FluidGrid, Metric};
    use rand::{Rng, SeedableRng};

    #[test]
    fn routes_agree_and_output_is_solenoidal() {
        let g = FluidGrid::new(12, 10, 1.3).unwrap();
        let ops = Operators::new(&g, &Metric::flat(&g));
        let pr = Projector::new(&ops, SolverOptions::default()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let u: Vec<f64> = (0..g.nvel()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = pr.project_with(&u, ProjectionRoute::TwoSolve).unwrap();
        let b = pr.project_with(&u, ProjectionRoute::Mixed).unwrap();
        assert!(ops.max_divergence(&a.u) < 1e-10);
        for (x, y) in a.u.iter().zip(&b.u) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}
