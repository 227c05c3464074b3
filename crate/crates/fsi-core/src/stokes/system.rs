//! Steady and implicit-Euler unsteady Stokes with no slip on the bottom,
//! prescribed normal velocity on the top, and pressure data on inlet/outlet.
//!
//! Unknown ordering: physical velocity (all faces) then cell pressure.
//! Momentum rows live on every vertical face and every interior horizontal
//! face; wall rows carry the Dirichlet condition on `u2`.

use super::grid::{FluidGrid, FluidState};
use super::lifting::TopTrace;
use super::ops::Operators;
use crate::error::{check_len, FsiError, Result};
use crate::linalg::{
    norm2, Csr, Ilu0, Krylov, LinearSolver, Preconditioner, SolverOptions, TripletBuilder,
};

/// Right-hand side data for one Stokes solve.
#[derive(Debug, Clone, PartialEq)]
pub struct StokesData {
    /// Body force at velocity faces (wall entries ignored).
    pub f: Vec<f64>,
    /// Normal velocity on the top faces.
    pub top: Vec<f64>,
    /// Pressure on the inlet, per cell row.
    pub theta_in: Vec<f64>,
    /// Pressure on the outlet, per cell row.
    pub theta_out: Vec<f64>,
}

impl StokesData {
    pub fn zero(grid: &FluidGrid) -> Self {
        Self {
            f: vec![0.0; grid.nvel()],
            top: vec![0.0; grid.nx],
            theta_in: vec![0.0; grid.nz],
            theta_out: vec![0.0; grid.nz],
        }
    }

    pub fn check(&self, grid: &FluidGrid) -> Result<()> {
        check_len("body force", grid.nvel(), self.f.len())?;
        check_len("top data", grid.nx, self.top.len())?;
        check_len("inlet pressure", grid.nz, self.theta_in.len())?;
        check_len("outlet pressure", grid.nz, self.theta_out.len())
    }

    pub fn with_top(mut self, g: &TopTrace) -> Self {
        self.top = g.faces.clone();
        self
    }
}

/// Adds the fluid rows `[inv_dt I - nu Lap, G; div, 0]` to `t`. Pressure
/// columns start at `p0`, divergence rows at `d0`. Wall rows get `1` on the
/// diagonal; the caller adds any coupling to those rows.
pub fn push_fluid_rows(t: &mut TripletBuilder, ops: &Operators, nu: f64, inv_dt: f64, p0: usize, d0: usize) {
    let g = &ops.grid;
    for row in 0..g.nvel() {
        if g.is_wall_face(row) {
            t.push(row, row, 1.0);
            continue;
        }
        if inv_dt != 0.0 {
            t.push(row, row, inv_dt);
        }
        for (c, v) in ops.lap.row(row) {
            t.push(row, c, -nu * v);
        }
        for (c, v) in ops.grad_n.row(row) {
            t.push(row, p0 + c, v);
        }
    }
    for r in 0..g.ncell() {
        for (c, v) in ops.div_u.row(r) {
            t.push(d0 + r, c, v);
        }
    }
}

/// Momentum right-hand side `f + inv_dt u_prev - G_data theta` on momentum rows.
pub fn momentum_rhs(ops: &Operators, data: &StokesData, inv_dt: f64, u_prev: Option<&[f64]>) -> Vec<f64> {
    let g = &ops.grid;
    let b = ops.layout();
    let theta = b.sides(&data.theta_in, &data.theta_out);
    let mut r = data.f.clone();
    if let Some(u) = u_prev {
        crate::linalg::axpy(inv_dt, u, &mut r);
    }
    ops.grad_n_data.matvec_add(&theta, -1.0, &mut r);
    for k in g.top_faces().into_iter().chain(g.bottom_faces()) {
        r[k] = 0.0;
    }
    r
}

/// Block upper-triangular preconditioner for saddle-point systems
/// `[A B; C 0]` with the pressure block last.
///
/// The Schur complement is approximated by `nu I - inv_dt L^{-1}` where `L`
/// is the pressure Laplacian (Cahouet-Chabard).
pub struct SaddlePrecond {
    n_primal: usize,
    a: Ilu0,
    b: Csr,
    lap: Option<Ilu0>,
    nu: f64,
    inv_dt: f64,
}

impl SaddlePrecond {
    pub fn new(k: &Csr, n_primal: usize, lap_neg: &Csr, nu: f64, inv_dt: f64) -> Result<Self> {
        let n = k.nrows;
        let primal: Vec<usize> = (0..n_primal).collect();
        let dual: Vec<usize> = (n_primal..n).collect();
        let a = Ilu0::new(&k.submatrix(&primal, &primal))?;
        let b = k.submatrix(&primal, &dual);
        let lap = if inv_dt > 0.0 { Some(Ilu0::new(lap_neg)?) } else { None };
        Ok(Self {
            n_primal,
            a,
            b,
            lap,
            nu,
            inv_dt,
        })
    }
}

impl Preconditioner for SaddlePrecond {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let (ra, rp) = r.split_at(self.n_primal);
        let (za, zp) = z.split_at_mut(self.n_primal);
        for (o, v) in zp.iter_mut().zip(rp) {
            *o = self.nu * v;
        }
        if let Some(l) = &self.lap {
            let mut y = vec![0.0; rp.len()];
            l.apply(rp, &mut y);
            crate::linalg::axpy(self.inv_dt, &y, zp);
        }
        let mut t = ra.to_vec();
        self.b.matvec_add(zp, -1.0, &mut t);
        self.a.apply(&t, za);
    }
}

/// Builds a solver for a saddle-point matrix whose pressure block is last.
pub(crate) fn saddle_solver(
    k: Csr,
    ops: &Operators,
    n_primal: usize,
    nu: f64,
    inv_dt: f64,
    opts: SolverOptions,
    context: &'static str,
) -> Result<LinearSolver> {
    let cells = ops.grid.ncell();
    let precond: Option<Box<dyn Preconditioner>> = if cells > opts.direct_max_cells {
        let lap = ops.div.matmul(&ops.pinv.matmul(&ops.grad_n)).scale(-1.0);
        Some(Box::new(SaddlePrecond::new(&k, n_primal, &lap, nu, inv_dt)?))
    } else {
        None
    };
    LinearSolver::new(k, cells, Krylov::Gmres, precond, opts, context)
}

/// Factorized Stokes operator for a fixed `nu` and time step.
pub struct StokesSolver {
    pub ops: Operators,
    pub nu: f64,
    pub dt: Option<f64>,
    solver: LinearSolver,
}

impl StokesSolver {
    /// `dt = None` gives the steady operator.
    pub fn new(ops: &Operators, nu: f64, dt: Option<f64>, opts: SolverOptions) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(FsiError::Config(format!("viscosity must be > 0, got {nu}")));
        }
        if let Some(d) = dt {
            if !(d > 0.0) {
                return Err(FsiError::Config(format!("time step must be > 0, got {d}")));
            }
        }
        let g = &ops.grid;
        let inv_dt = dt.map_or(0.0, |d| 1.0 / d);
        let n = g.nvel() + g.ncell();
        let mut t = TripletBuilder::new(n, n);
        push_fluid_rows(&mut t, ops, nu, inv_dt, g.nvel(), g.nvel());
        let k = t.build();
        let solver = saddle_solver(k, ops, g.nvel(), nu, inv_dt, opts, "stokes solve")?;
        Ok(Self {
            ops: ops.clone(),
            nu,
            dt,
            solver,
        })
    }

    fn inv_dt(&self) -> f64 {
        self.dt.map_or(0.0, |d| 1.0 / d)
    }

    pub fn matrix(&self) -> &Csr {
        self.solver.matrix()
    }

    /// Solves with `u_prev` the previous level (ignored when steady).
    pub fn solve(&self, u_prev: Option<&[f64]>, data: &StokesData) -> Result<(Vec<f64>, Vec<f64>)> {
        let g = &self.ops.grid;
        data.check(g)?;
        let inv_dt = self.inv_dt();
        let prev = if inv_dt > 0.0 { u_prev } else { None };
        if let Some(u) = prev {
            check_len("previous velocity", g.nvel(), u.len())?;
        }
        let mut rhs = momentum_rhs(&self.ops, data, inv_dt, prev);
        for i in 0..g.nx {
            rhs[g.u2(i, g.nz)] = data.top[i];
        }
        rhs.extend(std::iter::repeat(0.0).take(g.ncell()));
        let x = self.solver.solve(&rhs)?;
        let (u, p) = x.split_at(g.nvel());
        Ok((u.to_vec(), p.to_vec()))
    }

    /// Relative residual of a computed solution.
    pub fn residual(&self, u_prev: Option<&[f64]>, data: &StokesData, u: &[f64], p: &[f64]) -> f64 {
        let g = &self.ops.grid;
        let inv_dt = self.inv_dt();
        let mut rhs = momentum_rhs(&self.ops, data, inv_dt, if inv_dt > 0.0 { u_prev } else { None });
        for i in 0..g.nx {
            rhs[g.u2(i, g.nz)] = data.top[i];
        }
        rhs.extend(std::iter::repeat(0.0).take(g.ncell()));
        let mut x = u.to_vec();
        x.extend_from_slice(p);
        let mut r = rhs.clone();
        self.matrix().matvec_add(&x, -1.0, &mut r);
        norm2(&r) / norm2(&rhs).max(1.0)
    }

    pub fn step(&self, state: &FluidState, data: &StokesData) -> Result<FluidState> {
        let dt = self.dt.ok_or_else(|| FsiError::Precondition("steady solver used for a time step".into()))?;
        let (u, p) = self.solve(Some(&state.velocity()), data)?;
        FluidState::from_velocity(&self.ops.grid, &u, p, state.t + dt)
    }
}

/// `-nu Lap u + grad p = f`, `div u = 0`, `u2 = g` on top, `u = 0` on the
/// bottom, `u2 = 0` and `p = h` on inlet/outlet.
pub fn stokes_solve_steady(ops: &Operators, nu: f64, data: &StokesData, opts: SolverOptions) -> Result<FluidState> {
    let s = StokesSolver::new(ops, nu, None, opts)?;
    let (u, p) = s.solve(None, data)?;
    FluidState::from_velocity(&ops.grid, &u, p, 0.0)
}

/// One implicit-Euler step of unsteady Stokes.
pub fn unsteady_stokes_step(
    ops: &Operators,
    nu: f64,
    state: &FluidState,
    data: &StokesData,
    dt: f64,
    opts: SolverOptions,
) -> Result<FluidState> {
    StokesSolver::new(ops, nu, Some(dt), opts)?.step(state, data)
}

/// Steady Stokes lifting `D g` of top normal velocity (zero force and pressure data).
pub fn dirichlet_lift(ops: &Operators, nu: f64, g: &TopTrace, opts: SolverOptions) -> Result<FluidState> {
    let data = StokesData::zero(&ops.grid).with_top(g);
    stokes_solve_steady(ops, nu, &data, opts)
}

/// Cell pressure Laplacian with Dirichlet inlet/outlet and Neumann walls.
pub fn pressure_laplacian(ops: &Operators) -> Csr {
    ops.div.matmul(&ops.pinv.matmul(&ops.grad_n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stokes::grid::Metric;

    fn poiseuille(n: usize, opts: SolverOptions) -> f64 {
        let g = FluidGrid::new(n, n, 1.0).unwrap();
        let ops = Operators::new(&g, &Metric::flat(&g));
        let nu = 0.5;
        let mut d = StokesData::zero(&g);
        d.theta_in = vec![2.0; n];
        let s = stokes_solve_steady(&ops, nu, &d, opts).unwrap();
        let mut err = 0.0f64;
        for j in 0..n {
            let z = g.z_center(j);
            let exact = 2.0 / (2.0 * nu) * z * (1.0 - z);
            for i in 0..=n {
                err = err.max((s.u1[g.u1(i, j)] - exact).abs());
            }
        }
        err
    }

    #[test]
    fn poiseuille_second_order() {
        let e1 = poiseuille(16, SolverOptions::default());
        let e2 = poiseuille(32, SolverOptions::default());
        assert!(e1 / e2 > 3.5, "{e1} {e2}");
    }

    #[test]
    fn iterative_path_matches_direct() {
        let opts = SolverOptions {
            direct_max_cells: 0,
            tol: 1e-12,
            ..Default::default()
        };
        let a = poiseuille(16, SolverOptions::default());
        let b = poiseuille(16, opts);
        assert!((a - b).abs() < 1e-8);
    }
}
