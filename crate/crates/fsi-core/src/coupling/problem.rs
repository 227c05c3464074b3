//! Coupled fluid/beam problem data, states and trajectories.

use crate::beam::{BeamParams, BeamState};
use crate::error::{check_len, FsiError, Result};
use crate::geometry::{build_geometry, BeamProfile, GeometryMap};
use crate::linalg::{Csr, SolverOptions, TripletBuilder};
use crate::stokes::ops::u2_at;
use crate::stokes::{lift_divfree, FluidGrid, FluidState, Metric, Operators, Projector, TopTrace, Transfer};
use serde::{Deserialize, Serialize};

/// Grid, reference profile, physical parameters and the operators shared by
/// every solver of one reference configuration.
#[derive(Debug, Clone)]
pub struct CoupledProblem {
    pub ops: Operators,
    pub profile: BeamProfile,
    pub nu: f64,
    pub beam: BeamParams,
    pub transfer: Transfer,
    pub opts: SolverOptions,
    /// Reference-domain Laplacian of `u2` on the top faces (`nx x nvel`).
    pub top_lap: Csr,
}

impl CoupledProblem {
    pub fn new(grid: &FluidGrid, profile: &BeamProfile, nu: f64, beam: BeamParams, opts: SolverOptions) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(FsiError::Config(format!("viscosity must be > 0, got {nu}")));
        }
        if !(beam.gamma > 0.0) {
            return Err(FsiError::Config("coupled runs need gamma > 0".into()));
        }
        let tol = 1e-12 * grid.length;
        if (profile.length - grid.length).abs() > tol || (beam.length - grid.length).abs() > tol {
            return Err(FsiError::Config(format!(
                "lengths differ: grid {}, profile {}, beam {}",
                grid.length, profile.length, beam.length
            )));
        }
        check_len("reference profile nodes", beam.nodes, profile.nodes())?;
        let ops = Operators::new(grid, &Metric::new(grid, profile)?);
        let top_lap = top_laplacian(&ops);
        Ok(Self {
            transfer: Transfer::new(grid, beam.nodes)?,
            ops,
            profile: profile.clone(),
            nu,
            beam,
            opts,
            top_lap,
        })
    }

    pub fn grid(&self) -> &FluidGrid {
        &self.ops.grid
    }

    pub fn nodes(&self) -> usize {
        self.beam.nodes
    }

    /// Same physics on a new reference profile.
    pub fn with_profile(&self, profile: &BeamProfile) -> Result<Self> {
        Self::new(&self.ops.grid, profile, self.nu, self.beam, self.opts)
    }

    pub fn geometry(&self, beam: &BeamState) -> Result<GeometryMap> {
        build_geometry(&self.profile, &beam.eta, &beam.eta_t)
    }

    /// `f2` used at the top faces: the value on the face below.
    pub fn top_force(&self, f: &[f64]) -> Vec<f64> {
        let g = self.grid();
        (0..g.nx).map(|i| f[g.u2(i, g.nz - 1)]).collect()
    }

    /// Pressure on the top wall, `p(i, nz-1) + hz/2 * J * d_z p`, with the
    /// wall normal derivative read off the vertical momentum balance.
    pub fn pressure_trace(&self, u: &[f64], u_prev: &[f64], p: &[f64], f: &[f64], dt: f64) -> Vec<f64> {
        let g = self.grid();
        let lap = self.top_lap.matvec(u);
        let f2 = self.top_force(f);
        (0..g.nx)
            .map(|i| {
                let k = g.u2(i, g.nz);
                let dzp = f2[i] - (u[k] - u_prev[k]) / dt + self.nu * lap[i];
                p[g.cell(i, g.nz - 1)] + 0.5 * g.hz * self.ops.metric.j_c[i] * dzp
            })
            .collect()
    }
}

/// `d2f/dz'2` at the wall from five samples moving inward.
const WALL_SECOND: [f64; 5] = [35.0 / 12.0, -104.0 / 12.0, 114.0 / 12.0, -56.0 / 12.0, 11.0 / 12.0];
/// `df/dz'` at the wall (inward samples, derivative pointing outward).
const WALL_FIRST: [f64; 3] = [1.5, -2.0, 0.5];

fn top_laplacian(ops: &Operators) -> Csr {
    let g = &ops.grid;
    let m = &ops.metric;
    let nz = g.nz as isize;
    let mut t = TripletBuilder::new(g.nx, g.nvel());
    let hx2 = g.hx * g.hx;
    let hz2 = g.hz * g.hz;
    for i in 0..g.nx {
        let (cxz, czz, cz) = crate::stokes::grid::laplacian_coeffs(m.j_c[i], m.a_c[i], m.ax_c[i], 1.0);
        let ii = i as isize;
        let mut add = |a: isize, j: isize, c: f64| {
            if c != 0.0 {
                let (k, s) = u2_at(g, a, j);
                t.push(i, k, s * c);
            }
        };
        add(ii + 1, nz, 1.0 / hx2);
        add(ii, nz, -2.0 / hx2);
        add(ii - 1, nz, 1.0 / hx2);
        for (d, w) in WALL_SECOND.iter().enumerate() {
            add(ii, nz - d as isize, czz * w / hz2);
        }
        for (d, w) in WALL_FIRST.iter().enumerate() {
            add(ii, nz - d as isize, cz * w / g.hz);
            add(ii + 1, nz - d as isize, cxz * w / (2.0 * g.hx * g.hz));
            add(ii - 1, nz - d as isize, -cxz * w / (2.0 * g.hx * g.hz));
        }
    }
    t.build()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledState {
    pub fluid: FluidState,
    pub beam: BeamState,
}

impl CoupledState {
    pub fn zero(problem: &CoupledProblem) -> Self {
        Self {
            fluid: FluidState::zero(problem.grid()),
            beam: BeamState::zero(problem.nodes()),
        }
    }

    pub fn t(&self) -> f64 {
        self.beam.t
    }

    pub fn check(&self, problem: &CoupledProblem) -> Result<()> {
        self.fluid.check(problem.grid())?;
        check_len("beam displacement", problem.nodes(), self.beam.eta.len())?;
        check_len("beam velocity", problem.nodes(), self.beam.eta_t.len())
    }

    fn combine(&self, o: &Self, s: f64) -> Self {
        let lin = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + s * y).collect::<Vec<_>>();
        Self {
            fluid: FluidState {
                u1: lin(&self.fluid.u1, &o.fluid.u1),
                u2: lin(&self.fluid.u2, &o.fluid.u2),
                p: lin(&self.fluid.p, &o.fluid.p),
                t: self.fluid.t,
            },
            beam: BeamState {
                eta: lin(&self.beam.eta, &o.beam.eta),
                eta_t: lin(&self.beam.eta_t, &o.beam.eta_t),
                t: self.beam.t,
            },
        }
    }

    /// Largest absolute entry over all fields.
    pub fn max_abs(&self) -> f64 {
        let f = &self.fluid;
        let b = &self.beam;
        f.u1.iter()
            .chain(&f.u2)
            .chain(&f.p)
            .chain(&b.eta)
            .chain(&b.eta_t)
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// States at uniformly spaced levels; `states[0]` is the initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub dt: f64,
    pub states: Vec<CoupledState>,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.steps() as f64
    }

    pub fn last(&self) -> &CoupledState {
        self.states.last().expect("trajectory has an initial state")
    }

    /// Level-wise `self - other`.
    pub fn diff(&self, other: &Trajectory) -> Result<Trajectory> {
        check_len("trajectory levels", self.states.len(), other.states.len())?;
        Ok(Trajectory {
            dt: self.dt,
            states: self.states.iter().zip(&other.states).map(|(a, b)| a.combine(b, -1.0)).collect(),
        })
    }

    /// Largest absolute entry over all levels and fields.
    pub fn max_abs(&self) -> f64 {
        self.states.iter().fold(0.0, |m, s| m.max(s.max_abs()))
    }

    /// `min_{n,k} (1 + eta)`.
    pub fn min_gap(&self) -> f64 {
        self.states
            .iter()
            .flat_map(|s| s.beam.eta.iter())
            .fold(f64::INFINITY, |m, e| m.min(1.0 + e))
    }
}

/// `min_k (1 + eta_k)`; fails when it drops below `1 / (2 mu)`.
/// The bound itself is accepted.
pub fn collision_guard(beam: &BeamState, mu: f64) -> Result<f64> {
    let margin = beam.eta.iter().fold(f64::INFINITY, |m, e| m.min(1.0 + e));
    let threshold = 1.0 / (2.0 * mu);
    if margin < threshold || !margin.is_finite() {
        return Err(FsiError::Collision { margin, threshold });
    }
    Ok(margin)
}

/// Initial data made compatible with the coupled problem.
#[derive(Debug, Clone)]
pub struct PreparedInitial {
    pub state: CoupledState,
    /// `max |u_compatible - u_given|`.
    pub modification: f64,
}

/// Makes `u0` divergence free with `u2 = eta_t` on the top and no flux
/// through the bottom: `u = w + Pi (u0 - w)` with `w` the stream-function
/// lifting of the top trace. Compatible data are returned unchanged up to
/// solver tolerance.
pub fn prepare_initial(problem: &CoupledProblem, u0: &[f64], beam: &BeamState) -> Result<PreparedInitial> {
    let g = problem.grid();
    check_len("initial velocity", g.nvel(), u0.len())?;
    check_len("initial displacement", problem.nodes(), beam.eta.len())?;
    check_len("initial beam velocity", problem.nodes(), beam.eta_t.len())?;
    let n = problem.nodes();
    let scale = beam.eta.iter().chain(&beam.eta_t).fold(1.0f64, |m, v| m.max(v.abs()));
    for (name, v) in [("displacement", &beam.eta), ("velocity", &beam.eta_t)] {
        if v[0].abs() > 1e-12 * scale || v[n - 1].abs() > 1e-12 * scale {
            return Err(FsiError::Precondition(format!("initial beam {name} is not clamped")));
        }
    }
    let gap = beam.eta.iter().fold(f64::INFINITY, |m, e| m.min(1.0 + e));
    if !(gap > 0.0) {
        return Err(FsiError::Precondition(format!("initial configuration collides (min 1+eta = {gap:.3e})")));
    }
    let top = problem.transfer.fluid(&beam.eta_t)?;
    let w = lift_divfree(&problem.ops, &TopTrace::from_faces(top), crate::stokes::lifting::DEFAULT_CUTOFF)?;
    let rest: Vec<f64> = u0.iter().zip(&w).map(|(a, b)| a - b).collect();
    let proj = Projector::new(&problem.ops, problem.opts)?.project(&rest)?;
    let u: Vec<f64> = w.iter().zip(&proj.u).map(|(a, b)| a + b).collect();
    let modification = u.iter().zip(u0).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(PreparedInitial {
        state: CoupledState {
            fluid: FluidState::from_velocity(g, &u, vec![0.0; g.ncell()], beam.t)?,
            beam: beam.clone(),
        },
        modification,
    })
}
