//! Closed-form solution of the linear coupled problem on the flat channel.
//!
//! With `q = x^2 (L - x)^2`, `E = int_0^x q`, `S = 3z^2 - 2z^3`:
//! `psi = a'(t) E(x) S(z)`, `u = (-psi_z, psi_x)`, `eta = a(t) q(x)` and
//! `p = a(t) (cos(pi x / L) z^2 + x / L)`. Then `u = 0` on the bottom,
//! `u = eta_t e2` on the top and `u2 = 0` on the inlet/outlet. Forcings are
//! the residuals of the continuous equations.

use crate::beam::BeamState;
use crate::coupling::{prepare_initial, CoupledProblem, CoupledState};
use crate::error::{check_len, Result};
use crate::nonlinear::RhsLevel;
use crate::stokes::FluidGrid;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeProfile {
    /// `a = rate t`; implicit Euler is exact in time.
    Linear { rate: f64 },
    /// `a = amp sin(omega t)`.
    Sine { amp: f64, omega: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledCase {
    pub nu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub length: f64,
    pub time: TimeProfile,
}

impl CoupledCase {
    /// `(a, a', a'')`.
    fn a(&self, t: f64) -> [f64; 3] {
        match self.time {
            TimeProfile::Linear { rate } => [rate * t, rate, 0.0],
            TimeProfile::Sine { amp, omega } => {
                let (s, c) = (omega * t).sin_cos();
                [amp * s, amp * omega * c, -amp * omega * omega * s]
            }
        }
    }

    /// `(E, q, q', q'', q''')`.
    fn xs(&self, x: f64) -> [f64; 5] {
        let l = self.length;
        [
            l * l * x.powi(3) / 3.0 - l * x.powi(4) / 2.0 + x.powi(5) / 5.0,
            x * x * (l - x) * (l - x),
            2.0 * x * (l - x) * (l - 2.0 * x),
            2.0 * (l * l - 6.0 * l * x + 6.0 * x * x),
            24.0 * x - 12.0 * l,
        ]
    }

    /// `(S, S', S'', S''')`.
    fn zs(z: f64) -> [f64; 4] {
        [3.0 * z * z - 2.0 * z.powi(3), 6.0 * z - 6.0 * z * z, 6.0 - 12.0 * z, -12.0]
    }

    fn pshape(&self, x: f64, z: f64) -> [f64; 3] {
        let k = PI / self.length;
        let (s, c) = (k * x).sin_cos();
        [c * z * z + x / self.length, -k * s * z * z + 1.0 / self.length, 2.0 * c * z]
    }

    pub fn velocity(&self, x: f64, z: f64, t: f64) -> (f64, f64) {
        let (e, s) = (self.xs(x), Self::zs(z));
        let at = self.a(t)[1];
        (-at * e[0] * s[1], at * e[1] * s[0])
    }

    pub fn pressure(&self, x: f64, z: f64, t: f64) -> f64 {
        self.a(t)[0] * self.pshape(x, z)[0]
    }

    pub fn eta(&self, x: f64, t: f64) -> (f64, f64) {
        let a = self.a(t);
        let q = self.xs(x)[1];
        (a[0] * q, a[1] * q)
    }

    pub fn force(&self, x: f64, z: f64, t: f64) -> (f64, f64) {
        let (e, s) = (self.xs(x), Self::zs(z));
        let [a, at, att] = self.a(t);
        let v1 = -e[0] * s[1];
        let v2 = e[1] * s[0];
        let lap1 = -(e[2] * s[1] + e[0] * s[3]);
        let lap2 = e[3] * s[0] + e[1] * s[2];
        let p = self.pshape(x, z);
        (
            att * v1 - self.nu * at * lap1 + a * p[1],
            att * v2 - self.nu * at * lap2 + a * p[2],
        )
    }

    /// Beam load `eta_tt - beta eta_xx - gamma eta_txx + alpha eta_xxxx - p(x, 1)`.
    pub fn load(&self, x: f64, t: f64) -> f64 {
        let e = self.xs(x);
        let [a, at, att] = self.a(t);
        att * e[1] - self.beta * a * e[3] - self.gamma * at * e[3] + self.alpha * a * 24.0 - self.pressure(x, 1.0, t)
    }

    pub fn sample_velocity(&self, g: &FluidGrid, t: f64) -> Vec<f64> {
        let mut u = vec![0.0; g.nvel()];
        for j in 0..g.nz {
            for i in 0..=g.nx {
                u[g.u1(i, j)] = self.velocity(g.x_face(i), g.z_center(j), t).0;
            }
        }
        for j in 0..=g.nz {
            for i in 0..g.nx {
                u[g.u2(i, j)] = self.velocity(g.x_center(i), g.z_face(j), t).1;
            }
        }
        u
    }

    pub fn beam(&self, nodes: usize, t: f64) -> BeamState {
        let h = self.length / (nodes - 1) as f64;
        let (eta, eta_t) = (0..nodes).map(|k| self.eta(k as f64 * h, t)).unzip();
        BeamState { eta, eta_t, t }
    }

    /// Compatible discrete state close to the exact one at time `t`.
    pub fn state(&self, problem: &CoupledProblem, t: f64) -> Result<CoupledState> {
        let g = problem.grid();
        let beam = self.beam(problem.nodes(), t);
        let mut s = prepare_initial(problem, &self.sample_velocity(g, t), &beam)?.state;
        s.fluid.t = t;
        for j in 0..g.nz {
            for i in 0..g.nx {
                s.fluid.p[g.cell(i, j)] = self.pressure(g.x_center(i), g.z_center(j), t);
            }
        }
        Ok(s)
    }

    pub fn rhs(&self, problem: &CoupledProblem, t: f64) -> Result<RhsLevel> {
        let g = problem.grid();
        let n = problem.nodes();
        let mut r = RhsLevel::zero(g, n);
        for j in 0..g.nz {
            for i in 0..=g.nx {
                r.f[g.u1(i, j)] = self.force(g.x_face(i), g.z_center(j), t).0;
            }
            r.theta_in[j] = self.pressure(0.0, g.z_center(j), t);
            r.theta_out[j] = self.pressure(self.length, g.z_center(j), t);
        }
        for j in 1..g.nz {
            for i in 0..g.nx {
                r.f[g.u2(i, j)] = self.force(g.x_center(i), g.z_face(j), t).1;
            }
        }
        let h = self.length / (n - 1) as f64;
        for k in 1..n - 1 {
            r.h[k] = self.load(k as f64 * h, t);
        }
        Ok(r)
    }

    /// `(velocity L2 error, max displacement error)` at the state's time.
    pub fn errors(&self, problem: &CoupledProblem, s: &CoupledState) -> Result<(f64, f64)> {
        let g = problem.grid();
        s.check(problem)?;
        check_len("beam nodes", problem.nodes(), s.beam.eta.len())?;
        let w = g.velocity_weights();
        let u = self.sample_velocity(g, s.t());
        let su = s.fluid.velocity();
        let eu = (0..g.nvel()).map(|k| w[k] * (su[k] - u[k]).powi(2)).sum::<f64>().sqrt();
        let exact = self.beam(problem.nodes(), s.t());
        let ee = exact.eta.iter().zip(&s.beam.eta).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        Ok((eu, ee))
    }
}
