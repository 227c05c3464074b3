//! Damped clamped Euler–Bernoulli beam: finite-difference operator with
//! ghost-node clamping, energy, and implicit time stepping.

use crate::error::{check_len, FsiError, Result};
use crate::linalg::{Csr, TripletBuilder};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub length: f64,
    pub nodes: usize,
}

impl BeamParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, length: f64, nodes: usize) -> Result<Self> {
        let p = Self {
            alpha,
            beta,
            gamma,
            length,
            nodes,
        };
        p.validate()?;
        if !(gamma > 0.0) {
            return Err(FsiError::Precondition("gamma must be > 0".into()));
        }
        Ok(p)
    }

    /// Undamped beam (`gamma = 0`), only meant for vibration studies.
    pub fn undamped(alpha: f64, beta: f64, length: f64, nodes: usize) -> Result<Self> {
        let p = Self {
            alpha,
            beta,
            gamma: 0.0,
            length,
            nodes,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if self.nodes < 7 {
            return Err(FsiError::Precondition(format!(
                "beam stencil needs at least 7 nodes, got {}",
                self.nodes
            )));
        }
        if !(self.alpha > 0.0) {
            return Err(FsiError::Precondition("alpha must be > 0".into()));
        }
        if !(self.beta >= 0.0) {
            return Err(FsiError::Precondition("beta must be >= 0".into()));
        }
        if !(self.length > 0.0) {
            return Err(FsiError::Precondition("beam length must be > 0".into()));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        self.length / (self.nodes - 1) as f64
    }

    pub fn x(&self, k: usize) -> f64 {
        k as f64 * self.h()
    }

    /// Trapezoidal quadrature weights on the nodes.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.h();
        (0..self.nodes)
            .map(|k| if k == 0 || k + 1 == self.nodes { 0.5 * h } else { h })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamState {
    pub eta: Vec<f64>,
    pub eta_t: Vec<f64>,
    pub t: f64,
}

impl BeamState {
    pub fn zero(nodes: usize) -> Self {
        Self {
            eta: vec![0.0; nodes],
            eta_t: vec![0.0; nodes],
            t: 0.0,
        }
    }
}

/// `A = beta d_xx - alpha d_xxxx` on all nodes; the end rows are empty because the
/// end values are held at zero. Ghosts: `eta[-1] = eta[1]`, `eta[n] = eta[n-2]`.
pub fn operator_matrix(params: &BeamParams) -> Csr {
    let n = params.nodes;
    let h = params.h();
    let (a, b) = (params.alpha / h.powi(4), params.beta / (h * h));
    let mut t = TripletBuilder::new(n, n);
    let resolve = |k: isize| -> usize {
        if k < 0 {
            (-k) as usize
        } else if k >= n as isize {
            (2 * (n as isize - 1) - k) as usize
        } else {
            k as usize
        }
    };
    for k in 1..n - 1 {
        let ki = k as isize;
        for (off, w) in [(-1isize, b), (0, -2.0 * b), (1, b)] {
            t.push(k, resolve(ki + off), w);
        }
        for (off, w) in [(-2isize, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)] {
            t.push(k, resolve(ki + off), -a * w);
        }
    }
    t.build()
}

/// Dirichlet second difference `d_xx` on the interior nodes.
pub fn laplacian_matrix(params: &BeamParams) -> Csr {
    let n = params.nodes;
    let h2 = params.h() * params.h();
    let mut t = TripletBuilder::new(n, n);
    for k in 1..n - 1 {
        t.push(k, k - 1, 1.0 / h2);
        t.push(k, k, -2.0 / h2);
        t.push(k, k + 1, 1.0 / h2);
    }
    t.build()
}

pub fn beam_operator_apply(params: &BeamParams, eta: &[f64]) -> Result<Vec<f64>> {
    check_len("beam field", params.nodes, eta.len())?;
    Ok(operator_matrix(params).matvec(eta))
}

/// `(kinetic, potential)` with kinetic `1/2 ||eta_t||^2` and potential
/// `1/2 (beta ||eta_x||^2 + alpha ||eta_xx||^2)`; trapezoidal weights on nodal
/// quantities, `eta_x` taken per cell.
pub fn beam_energy(params: &BeamParams, state: &BeamState) -> (f64, f64) {
    let n = params.nodes;
    let h = params.h();
    let w = params.weights();
    let kinetic = 0.5 * (0..n).map(|k| w[k] * state.eta_t[k].powi(2)).sum::<f64>();
    let e = &state.eta;
    let slope: f64 = (0..n - 1).map(|k| ((e[k + 1] - e[k]) / h).powi(2) * h).sum();
    let ghost = |k: isize| -> f64 {
        if k < 0 {
            e[(-k) as usize]
        } else if k >= n as isize {
            e[(2 * (n as isize - 1) - k) as usize]
        } else {
            e[k as usize]
        }
    };
    let curv: f64 = (0..n)
        .map(|k| {
            let ki = k as isize;
            let d2 = (ghost(ki + 1) - 2.0 * ghost(ki) + ghost(ki - 1)) / (h * h);
            w[k] * d2 * d2
        })
        .sum();
    (kinetic, 0.5 * (params.beta * slope + params.alpha * curv))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BeamScheme {
    #[default]
    ImplicitEuler,
    CrankNicolson,
}

/// Factorized single-beam step for fixed `(params, dt, mass, scheme)`.
pub struct BeamStepper {
    params: BeamParams,
    dt: f64,
    scheme: BeamScheme,
    a: Csr,
    lap: Csr,
    mass: DMatrix<f64>,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

fn interior(n: usize) -> std::ops::Range<usize> {
    1..n - 1
}

impl BeamStepper {
    /// `mass` acts on all nodes; only its interior block is used.
    pub fn new(
        params: &BeamParams,
        dt: f64,
        mass: Option<&DMatrix<f64>>,
        scheme: BeamScheme,
    ) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(FsiError::Precondition("dt must be > 0".into()));
        }
        let n = params.nodes;
        let mass = match mass {
            Some(m) => {
                if m.nrows() != n || m.ncols() != n {
                    return Err(FsiError::Dimension {
                        what: "beam mass matrix",
                        expected: n,
                        got: m.nrows(),
                    });
                }
                m.clone()
            }
            None => DMatrix::identity(n, n),
        };
        let a = operator_matrix(params);
        let lap = laplacian_matrix(params);
        let (cd, ca) = match scheme {
            BeamScheme::ImplicitEuler => (dt, dt * dt),
            BeamScheme::CrankNicolson => (0.5 * dt, 0.25 * dt * dt),
        };
        let m = n - 2;
        let mut k = DMatrix::<f64>::zeros(m, m);
        for (i, r) in interior(n).enumerate() {
            for (j, c) in interior(n).enumerate() {
                k[(i, j)] = mass[(r, c)] - cd * params.gamma * lap.get(r, c) - ca * a.get(r, c);
            }
        }
        let lu = k.lu();
        if lu.determinant().abs() == 0.0 {
            return Err(FsiError::Solver {
                context: "beam step matrix singular".into(),
                residual: f64::NAN,
                iterations: 0,
            });
        }
        Ok(Self {
            params: *params,
            dt,
            scheme,
            a,
            lap,
            mass,
            lu,
        })
    }

    /// Advances one step under the nodal `load` (taken at the new time level;
    /// for Crank–Nicolson it is the mid-step average).
    pub fn step(&self, state: &BeamState, load: &[f64]) -> Result<BeamState> {
        let n = self.params.nodes;
        check_len("beam load", n, load.len())?;
        let dt = self.dt;
        let a_eta = self.a.matvec(&state.eta);
        let mut rhs_full = vec![0.0; n];
        let mv = &self.mass * DVector::from_column_slice(&state.eta_t);
        for k in interior(n) {
            rhs_full[k] = mv[k] + dt * (a_eta[k] + load[k]);
        }
        if self.scheme == BeamScheme::CrankNicolson {
            let lap_v = self.lap.matvec(&state.eta_t);
            let a_v = self.a.matvec(&state.eta_t);
            for k in interior(n) {
                rhs_full[k] += 0.5 * dt * self.params.gamma * lap_v[k] + 0.25 * dt * dt * a_v[k];
            }
        }
        let rhs = DVector::from_iterator(n - 2, interior(n).map(|k| rhs_full[k]));
        let sol = self.lu.solve(&rhs).ok_or_else(|| FsiError::Solver {
            context: "beam step".into(),
            residual: f64::NAN,
            iterations: 0,
        })?;
        let mut eta_t = vec![0.0; n];
        for (i, k) in interior(n).enumerate() {
            eta_t[k] = sol[i];
        }
        let eta = match self.scheme {
            BeamScheme::ImplicitEuler => state
                .eta
                .iter()
                .zip(&eta_t)
                .map(|(e, v)| e + dt * v)
                .collect(),
            BeamScheme::CrankNicolson => state
                .eta
                .iter()
                .zip(eta_t.iter().zip(&state.eta_t))
                .map(|(e, (v1, v0))| e + 0.5 * dt * (v1 + v0))
                .collect(),
        };
        Ok(BeamState {
            eta,
            eta_t,
            t: state.t + dt,
        })
    }
}

pub fn beam_step(
    params: &BeamParams,
    state: &BeamState,
    load: &[f64],
    dt: f64,
    mass: Option<&DMatrix<f64>>,
) -> Result<BeamState> {
    BeamStepper::new(params, dt, mass, BeamScheme::ImplicitEuler)?.step(state, load)
}

/// Smallest angular frequency of the undamped discrete beam, by inverse
/// iteration on `-A` restricted to the interior nodes.
pub fn lowest_frequency(params: &BeamParams) -> f64 {
    let n = params.nodes;
    let a = operator_matrix(params);
    let m = n - 2;
    let mut k = DMatrix::<f64>::zeros(m, m);
    for (i, r) in interior(n).enumerate() {
        for (j, c) in interior(n).enumerate() {
            k[(i, j)] = -a.get(r, c);
        }
    }
    let lu = k.clone().lu();
    let mut v = DVector::from_fn(m, |i, _| ((i + 1) as f64 * std::f64::consts::PI / (m + 1) as f64).sin());
    let mut lambda = 0.0;
    for _ in 0..500 {
        let w = lu.solve(&v).expect("clamped beam operator is nonsingular");
        let nw = w.norm();
        let next = w / nw;
        let rq = next.dot(&(&k * &next));
        let done = (rq - lambda).abs() <= 1e-14 * rq.abs();
        lambda = rq;
        v = next;
        if done {
            break;
        }
    }
    lambda.sqrt()
}
