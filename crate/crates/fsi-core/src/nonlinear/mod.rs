//! Nonlinear right-hand sides of the fixed reference formulation.

pub mod eval;
pub mod sample;

pub use eval::{
    eval_f, eval_g, eval_h, eval_m, eval_n, eval_psi, eval_theta, eval_w, g_terms, psi_faces, GTerms, Level,
};

use crate::error::{check_len, FsiError, Result};
use crate::geometry::GeometryMap;
use crate::stokes::{FluidGrid, Operators, StokesData, Transfer};

/// Data of the linear coupled problem at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsLevel {
    /// Body force on the velocity faces.
    pub f: Vec<f64>,
    pub theta_in: Vec<f64>,
    pub theta_out: Vec<f64>,
    /// Extra beam load on beam nodes.
    pub h: Vec<f64>,
}

impl RhsLevel {
    pub fn zero(grid: &FluidGrid, nodes: usize) -> Self {
        Self {
            f: vec![0.0; grid.nvel()],
            theta_in: vec![0.0; grid.nz],
            theta_out: vec![0.0; grid.nz],
            h: vec![0.0; nodes],
        }
    }

    pub fn check(&self, grid: &FluidGrid, nodes: usize) -> Result<()> {
        check_len("body force", grid.nvel(), self.f.len())?;
        check_len("inlet data", grid.nz, self.theta_in.len())?;
        check_len("outlet data", grid.nz, self.theta_out.len())?;
        check_len("beam load", nodes, self.h.len())?;
        let finite = self
            .f
            .iter()
            .chain(&self.theta_in)
            .chain(&self.theta_out)
            .chain(&self.h)
            .all(|v| v.is_finite());
        if finite {
            Ok(())
        } else {
            Err(FsiError::Precondition("non-finite right-hand side".into()))
        }
    }

    /// Fluid part with the given top-wall velocity.
    pub fn stokes_data(&self, top: Vec<f64>) -> StokesData {
        StokesData {
            f: self.f.clone(),
            top,
            theta_in: self.theta_in.clone(),
            theta_out: self.theta_out.clone(),
        }
    }

    fn add(&mut self, o: &RhsLevel) {
        let add = |a: &mut Vec<f64>, b: &Vec<f64>| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        add(&mut self.f, &o.f);
        add(&mut self.theta_in, &o.theta_in);
        add(&mut self.theta_out, &o.theta_out);
        add(&mut self.h, &o.h);
    }
}

/// Right-hand sides for time levels `1..=N` of a slab (`levels[n - 1]` is level `n`).
#[derive(Debug, Clone, PartialEq)]
pub struct RhsBundle {
    pub levels: Vec<RhsLevel>,
}

impl RhsBundle {
    pub fn zero(grid: &FluidGrid, nodes: usize, steps: usize) -> Self {
        Self {
            levels: vec![RhsLevel::zero(grid, nodes); steps],
        }
    }

    pub fn steps(&self) -> usize {
        self.levels.len()
    }

    pub fn check(&self, grid: &FluidGrid, nodes: usize) -> Result<()> {
        self.levels.iter().try_for_each(|l| l.check(grid, nodes))
    }

    /// Level-wise sum with another bundle of the same shape.
    pub fn plus(&self, other: &RhsBundle) -> Result<RhsBundle> {
        check_len("bundle levels", self.steps(), other.steps())?;
        let mut out = self.clone();
        out.levels.iter_mut().zip(&other.levels).for_each(|(a, b)| a.add(b));
        Ok(out)
    }
}

/// Evaluates `(F, Theta, H)` for one level of a trajectory.
pub struct NonlinearEvaluator {
    pub ops: Operators,
    pub transfer: Transfer,
    pub nu: f64,
}

impl NonlinearEvaluator {
    pub fn new(ops: &Operators, nodes: usize, nu: f64) -> Result<Self> {
        Ok(Self {
            ops: ops.clone(),
            transfer: Transfer::new(&ops.grid, nodes)?,
            nu,
        })
    }

    pub fn level(&self, now: Level<'_>, prev: Level<'_>, p: &[f64], dt: f64) -> Result<RhsLevel> {
        let g = &self.ops.grid;
        let f = eval_f(&self.ops, now, prev, p, dt, self.nu)?;
        let (theta_in, theta_out) = eval_theta(g, now.u)?;
        let h = eval_h(&self.ops, &self.transfer, now.gm, now.u, self.nu)?;
        Ok(RhsLevel { f, theta_in, theta_out, h })
    }
}

/// `max_n max_k |eta~|` over the levels of a geometry trajectory.
pub fn max_relative_displacement(levels: &[GeometryMap]) -> f64 {
    levels
        .iter()
        .flat_map(|gm| gm.tilde.iter())
        .fold(0.0, |m, v| m.max(v.abs()))
}
