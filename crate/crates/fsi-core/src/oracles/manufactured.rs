//! Closed-form Stokes solutions on the flat channel with their forcing.
//!
//! Velocity comes from the stream function `psi = a(t) cos(k x) Z(z)` with
//! `k = pi / L` and `Z = 3z^2 - 2z^3`, so that `u = 0` on the bottom,
//! `u1 = 0` and `u2 = g` on the top, `u2 = 0` and `d_x u1 = 0` on the
//! inlet/outlet. Pressure is `a(t) (sin(k x) cos(pi z) + c x)`.

use crate::stokes::{FluidGrid, FluidState, StokesData};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesCase {
    pub nu: f64,
    pub length: f64,
    /// Linear pressure drop coefficient.
    pub slope: f64,
    /// Time dependence `a(t) = 1 + amp sin(omega t)`; `amp = 0` is steady.
    pub amp: f64,
    pub omega: f64,
}

impl StokesCase {
    pub fn steady(nu: f64, length: f64) -> Self {
        Self {
            nu,
            length,
            slope: 1.0,
            amp: 0.0,
            omega: 0.0,
        }
    }

    pub fn unsteady(nu: f64, length: f64) -> Self {
        Self {
            nu,
            length,
            slope: 1.0,
            amp: 0.5,
            omega: 2.0,
        }
    }

    fn a(&self, t: f64) -> f64 {
        1.0 + self.amp * (self.omega * t).sin()
    }

    fn a_t(&self, t: f64) -> f64 {
        self.amp * self.omega * (self.omega * t).cos()
    }

    fn k(&self) -> f64 {
        PI / self.length
    }

    /// `(X, X', X'', X''')` for `X = cos(k x)`.
    fn xs(&self, x: f64) -> [f64; 4] {
        let k = self.k();
        let (s, c) = (k * x).sin_cos();
        [c, -k * s, -k * k * c, k * k * k * s]
    }

    /// `(Z, Z', Z'', Z''')`.
    fn zs(z: f64) -> [f64; 4] {
        [3.0 * z * z - 2.0 * z * z * z, 6.0 * z - 6.0 * z * z, 6.0 - 12.0 * z, -12.0]
    }

    pub fn velocity(&self, x: f64, z: f64, t: f64) -> (f64, f64) {
        let (xx, zz) = (self.xs(x), Self::zs(z));
        let a = self.a(t);
        (-a * xx[0] * zz[1], a * xx[1] * zz[0])
    }

    pub fn pressure(&self, x: f64, z: f64, t: f64) -> f64 {
        self.a(t) * ((self.k() * x).sin() * (PI * z).cos() + self.slope * x)
    }

    pub fn force(&self, x: f64, z: f64, t: f64) -> (f64, f64) {
        let (xx, zz) = (self.xs(x), Self::zs(z));
        let (a, at) = (self.a(t), self.a_t(t));
        let u1 = -xx[0] * zz[1];
        let u2 = xx[1] * zz[0];
        let lap1 = -(xx[2] * zz[1] + xx[0] * zz[3]);
        let lap2 = xx[3] * zz[0] + xx[1] * zz[2];
        let k = self.k();
        let px = k * (k * x).cos() * (PI * z).cos() + self.slope;
        let pz = -PI * (k * x).sin() * (PI * z).sin();
        (
            at * u1 - self.nu * a * lap1 + a * px,
            at * u2 - self.nu * a * lap2 + a * pz,
        )
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

    pub fn sample_pressure(&self, g: &FluidGrid, t: f64) -> Vec<f64> {
        let mut p = vec![0.0; g.ncell()];
        for j in 0..g.nz {
            for i in 0..g.nx {
                p[g.cell(i, j)] = self.pressure(g.x_center(i), g.z_center(j), t);
            }
        }
        p
    }

    pub fn state(&self, g: &FluidGrid, t: f64) -> FluidState {
        let u = self.sample_velocity(g, t);
        FluidState::from_velocity(g, &u, self.sample_pressure(g, t), t).expect("sampled on the grid")
    }

    /// Forcing, top velocity and inlet/outlet pressure at time `t`.
    pub fn data(&self, g: &FluidGrid, t: f64) -> StokesData {
        let mut d = StokesData::zero(g);
        for j in 0..g.nz {
            for i in 0..=g.nx {
                d.f[g.u1(i, j)] = self.force(g.x_face(i), g.z_center(j), t).0;
            }
            d.theta_in[j] = self.pressure(0.0, g.z_center(j), t);
            d.theta_out[j] = self.pressure(self.length, g.z_center(j), t);
        }
        for j in 1..g.nz {
            for i in 0..g.nx {
                d.f[g.u2(i, j)] = self.force(g.x_center(i), g.z_face(j), t).1;
            }
        }
        for i in 0..g.nx {
            d.top[i] = self.velocity(g.x_center(i), 1.0, t).1;
        }
        d
    }

    /// Discrete L2 errors `(velocity, pressure)` against the exact solution.
    pub fn errors(&self, g: &FluidGrid, s: &FluidState) -> (f64, f64) {
        let w = g.velocity_weights();
        let u = self.sample_velocity(g, s.t);
        let p = self.sample_pressure(g, s.t);
        let su = s.velocity();
        let eu = (0..g.nvel()).map(|k| w[k] * (su[k] - u[k]).powi(2)).sum::<f64>().sqrt();
        let ep = (0..g.ncell()).map(|k| g.cell_area() * (s.p[k] - p[k]).powi(2)).sum::<f64>().sqrt();
        (eu, ep)
    }
}

/// Observed orders `log2(e[k] / e[k+1])` for successive halvings.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}
