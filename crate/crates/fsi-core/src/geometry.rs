//! Reference profile, change of variables onto the reference configuration,
//! relative displacement and the boundary transport.
//!
//! The physical domain is `{0 < x < L, 0 < y < 1 + eta(t,x)}`; the reference
//! domain is the graph of `1 + eta0`. A point `(x, y)` maps to
//! `(x, z)` with `z = (1 + eta0) / (1 + eta) * y`.

use crate::error::{check_len, FsiError, Result};
use serde::{Deserialize, Serialize};

/// Centered/one-sided finite differences on a clamped nodal array
/// (`f = f_x = 0` at both ends, imposed by even reflection `f[-1] = f[1]`).
pub mod fd {
    fn ghost(f: &[f64], k: isize) -> f64 {
        let n = f.len() as isize;
        if k < 0 {
            f[(-k) as usize]
        } else if k >= n {
            f[(2 * (n - 1) - k) as usize]
        } else {
            f[k as usize]
        }
    }

    pub fn dx(f: &[f64], h: f64) -> Vec<f64> {
        (0..f.len() as isize)
            .map(|k| (ghost(f, k + 1) - ghost(f, k - 1)) / (2.0 * h))
            .collect()
    }

    pub fn dxx(f: &[f64], h: f64) -> Vec<f64> {
        (0..f.len() as isize)
            .map(|k| (ghost(f, k + 1) - 2.0 * ghost(f, k) + ghost(f, k - 1)) / (h * h))
            .collect()
    }

    /// Third derivative: centered five-point stencil in the interior,
    /// one-sided four-point stencils at the two nodes next to each end and at the ends.
    pub fn dxxx(f: &[f64], h: f64) -> Vec<f64> {
        let n = f.len();
        let h3 = h * h * h;
        (0..n)
            .map(|k| {
                if k >= 2 && k + 2 < n {
                    (f[k + 2] - 2.0 * f[k + 1] + 2.0 * f[k - 1] - f[k - 2]) / (2.0 * h3)
                } else if k < 2 {
                    (-f[0] + 3.0 * f[1] - 3.0 * f[2] + f[3]) / h3
                } else {
                    (f[n - 1] - 3.0 * f[n - 2] + 3.0 * f[n - 3] - f[n - 4]) / h3
                }
            })
            .collect()
    }

    /// Linear interpolation of nodal values at `x` (clamped to `[0, L]`).
    pub fn interp(f: &[f64], h: f64, x: f64) -> f64 {
        let n = f.len();
        let s = (x / h).clamp(0.0, (n - 1) as f64);
        let k = (s.floor() as usize).min(n - 2);
        let t = s - k as f64;
        (1.0 - t) * f[k] + t * f[k + 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rect,
    Graph,
}

/// Samples of the reference profile `eta0` on the beam nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamProfile {
    pub length: f64,
    pub eta0: Vec<f64>,
    pub eta0_x: Vec<f64>,
    pub eta0_xx: Vec<f64>,
    pub eta0_xxx: Vec<f64>,
}

impl BeamProfile {
    pub fn from_values(length: f64, eta0: Vec<f64>) -> Result<Self> {
        if eta0.len() < 7 {
            return Err(FsiError::Precondition(format!(
                "beam grid needs at least 7 nodes, got {}",
                eta0.len()
            )));
        }
        if !(length > 0.0) {
            return Err(FsiError::Precondition("beam length must be > 0".into()));
        }
        let h = length / (eta0.len() - 1) as f64;
        if let Some((k, v)) = eta0.iter().enumerate().find(|(_, v)| !(1.0 + **v > 0.0)) {
            return Err(FsiError::Precondition(format!(
                "1 + eta0 must be positive (node {k}: eta0 = {v})"
            )));
        }
        let n = eta0.len();
        let curv = fd::dxx(&eta0, h).iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let scale = eta0.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let end_tol = 1e-12 * scale;
        let slope_tol = h * curv + 1e-12;
        let slope0 = (eta0[1] - eta0[0]) / h;
        let slope1 = (eta0[n - 1] - eta0[n - 2]) / h;
        if eta0[0].abs() > end_tol || eta0[n - 1].abs() > end_tol {
            return Err(FsiError::Precondition(
                "reference profile must vanish at both clamped ends".into(),
            ));
        }
        if slope0.abs() > slope_tol || slope1.abs() > slope_tol {
            return Err(FsiError::Precondition(
                "reference profile must have zero slope at both clamped ends".into(),
            ));
        }
        Ok(Self {
            length,
            eta0_x: fd::dx(&eta0, h),
            eta0_xx: fd::dxx(&eta0, h),
            eta0_xxx: fd::dxxx(&eta0, h),
            eta0,
        })
    }

    pub fn zero(nodes: usize, length: f64) -> Result<Self> {
        Self::from_values(length, vec![0.0; nodes])
    }

    pub fn from_fn(nodes: usize, length: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_values(length, node_samples(nodes, length, f))
    }

    /// `a * 16 x^2 (L-x)^2 / L^4`: clamped bump of height `a` at mid-span.
    pub fn bump(nodes: usize, length: f64, amplitude: f64) -> Result<Self> {
        Self::from_fn(nodes, length, |x| bump_shape(x, length) * amplitude)
    }

    /// `sum_k c_k x^k`.
    pub fn polynomial(nodes: usize, length: f64, coeffs: &[f64]) -> Result<Self> {
        Self::from_fn(nodes, length, |x| {
            coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
        })
    }

    pub fn nodes(&self) -> usize {
        self.eta0.len()
    }

    pub fn h(&self) -> f64 {
        self.length / (self.nodes() - 1) as f64
    }

    pub fn node_x(&self, k: usize) -> f64 {
        k as f64 * self.h()
    }

    pub fn is_flat(&self) -> bool {
        self.eta0.iter().all(|v| *v == 0.0)
    }

    pub fn mode(&self) -> Mode {
        if self.is_flat() {
            Mode::Rect
        } else {
            Mode::Graph
        }
    }

    pub fn at(&self, x: f64) -> f64 {
        fd::interp(&self.eta0, self.h(), x)
    }

    pub fn dx_at(&self, x: f64) -> f64 {
        fd::interp(&self.eta0_x, self.h(), x)
    }

    pub fn dxx_at(&self, x: f64) -> f64 {
        fd::interp(&self.eta0_xx, self.h(), x)
    }

    /// `||(1 + eta0)^{-1}||_inf`.
    pub fn inverse_gap(&self) -> f64 {
        self.eta0.iter().fold(0.0f64, |m, v| m.max(1.0 / (1.0 + v)))
    }
}

pub fn bump_shape(x: f64, length: f64) -> f64 {
    16.0 * x * x * (length - x) * (length - x) / length.powi(4)
}

pub fn node_samples(nodes: usize, length: f64, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let h = length / (nodes - 1) as f64;
    (0..nodes).map(|k| f(k as f64 * h)).collect()
}

/// Current beam configuration expressed relative to the reference profile.
#[derive(Debug, Clone)]
pub struct GeometryMap {
    pub profile: BeamProfile,
    pub mode: Mode,
    pub eta: Vec<f64>,
    pub eta_t: Vec<f64>,
    pub eta_x: Vec<f64>,
    pub tilde: Vec<f64>,
    pub tilde_x: Vec<f64>,
    pub tilde_xx: Vec<f64>,
    pub tilde_xxx: Vec<f64>,
    pub tilde_t: Vec<f64>,
}

/// Geometric quantities interpolated at one abscissa.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GeomSample {
    pub eta0: f64,
    pub eta0_x: f64,
    pub eta0_xx: f64,
    pub eta_x: f64,
    pub tilde: f64,
    pub tilde_x: f64,
    pub tilde_xx: f64,
    pub tilde_t: f64,
}

impl GeomSample {
    /// Jacobian of the flattening `z' = z / (1 + eta0)`.
    pub fn j0(&self) -> f64 {
        1.0 + self.eta0
    }
}

pub fn build_geometry(profile: &BeamProfile, eta: &[f64], eta_t: &[f64]) -> Result<GeometryMap> {
    let n = profile.nodes();
    check_len("eta", n, eta.len())?;
    check_len("eta_t", n, eta_t.len())?;
    let margin = eta.iter().fold(f64::INFINITY, |m, v| m.min(1.0 + v));
    if !(margin > 0.0) {
        return Err(FsiError::Collision {
            margin,
            threshold: 0.0,
        });
    }
    let h = profile.h();
    let tilde: Vec<f64> = eta
        .iter()
        .zip(&profile.eta0)
        .map(|(e, e0)| (e - e0) / (1.0 + e0))
        .collect();
    let tilde_t = eta_t
        .iter()
        .zip(&profile.eta0)
        .map(|(et, e0)| et / (1.0 + e0))
        .collect();
    Ok(GeometryMap {
        profile: profile.clone(),
        mode: profile.mode(),
        eta: eta.to_vec(),
        eta_t: eta_t.to_vec(),
        eta_x: fd::dx(eta, h),
        tilde_x: fd::dx(&tilde, h),
        tilde_xx: fd::dxx(&tilde, h),
        tilde_xxx: fd::dxxx(&tilde, h),
        tilde,
        tilde_t,
    })
}

impl GeometryMap {
    pub fn at(&self, x: f64) -> GeomSample {
        let h = self.profile.h();
        let p = &self.profile;
        GeomSample {
            eta0: fd::interp(&p.eta0, h, x),
            eta0_x: fd::interp(&p.eta0_x, h, x),
            eta0_xx: fd::interp(&p.eta0_xx, h, x),
            eta_x: fd::interp(&self.eta_x, h, x),
            tilde: fd::interp(&self.tilde, h, x),
            tilde_x: fd::interp(&self.tilde_x, h, x),
            tilde_xx: fd::interp(&self.tilde_xx, h, x),
            tilde_t: fd::interp(&self.tilde_t, h, x),
        }
    }

    pub fn eta_at(&self, x: f64) -> f64 {
        fd::interp(&self.eta, self.profile.h(), x)
    }

    /// `min_k (1 + eta_k)`.
    pub fn gap(&self) -> f64 {
        self.eta.iter().fold(f64::INFINITY, |m, v| m.min(1.0 + v))
    }

    fn check_x(&self, x: f64) -> Result<()> {
        if (0.0..=self.profile.length).contains(&x) {
            Ok(())
        } else {
            Err(FsiError::Domain(format!(
                "x = {x} outside [0, {}]",
                self.profile.length
            )))
        }
    }

    /// Physical point `(x, y)` to reference coordinates `(x, z)`.
    pub fn map_forward(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        self.check_x(x)?;
        let top = 1.0 + self.eta_at(x);
        if !(0.0..=top * (1.0 + 1e-14)).contains(&y) {
            return Err(FsiError::Domain(format!("y = {y} outside [0, {top}]")));
        }
        Ok((x, (1.0 + self.profile.at(x)) / top * y))
    }

    /// Reference point `(x, z)` back to physical `(x, y)`.
    pub fn map_inverse(&self, x: f64, z: f64) -> Result<(f64, f64)> {
        self.check_x(x)?;
        let top0 = 1.0 + self.profile.at(x);
        if !(0.0..=top0 * (1.0 + 1e-14)).contains(&z) {
            return Err(FsiError::Domain(format!("z = {z} outside [0, {top0}]")));
        }
        Ok((x, (1.0 + self.eta_at(x)) / top0 * z))
    }
}

/// Relabels a trace sampled at the top-boundary nodes `(x_k, 1 + eta0(x_k))`
/// of the reference domain as a field on the flat beam line `(x_k, 1)`.
pub fn transport_trace(profile: &BeamProfile, g: &[f64]) -> Result<Vec<f64>> {
    check_len("top trace", profile.nodes(), g.len())?;
    Ok(g.to_vec())
}

/// Inverse of [`transport_trace`].
pub fn transport_trace_inverse(profile: &BeamProfile, g: &[f64]) -> Result<Vec<f64>> {
    check_len("beam trace", profile.nodes(), g.len())?;
    Ok(g.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_displacement_gives_zero_tilde() {
        let p = BeamProfile::bump(17, 1.0, 0.3).unwrap();
        let gm = build_geometry(&p, &p.eta0, &vec![0.0; 17]).unwrap();
        for f in [&gm.tilde, &gm.tilde_x, &gm.tilde_xx, &gm.tilde_xxx, &gm.tilde_t] {
            assert!(f.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn flat_profile_tilde_is_eta() {
        let p = BeamProfile::zero(17, 1.0).unwrap();
        let eta = node_samples(17, 1.0, |x| 0.2 * (3.0 * x).sin() * bump_shape(x, 1.0));
        let gm = build_geometry(&p, &eta, &vec![0.0; 17]).unwrap();
        assert_eq!(gm.tilde, eta);
        assert_eq!(gm.mode, Mode::Rect);
    }

    #[test]
    fn tilde_matches_pointwise_quotient() {
        let l = 1.0;
        let e0 = |x: f64| 0.3 * x * x * (l - x) * (l - x) * 16.0 / l.powi(4);
        let p = BeamProfile::from_fn(17, l, e0).unwrap();
        let eta: Vec<f64> = p.eta0.iter().map(|v| 1.1 * v).collect();
        let gm = build_geometry(&p, &eta, &vec![0.0; 17]).unwrap();
        for k in 0..17 {
            let x = k as f64 / 16.0;
            let expect = (1.1 * e0(x) - e0(x)) / (1.0 + e0(x));
            assert!((gm.tilde[k] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn map_special_points() {
        let p = BeamProfile::bump(33, 1.0, 0.2).unwrap();
        let eta: Vec<f64> = node_samples(33, 1.0, |x| 0.05 * bump_shape(x, 1.0));
        let gm = build_geometry(&p, &eta, &vec![0.0; 33]).unwrap();
        let same = build_geometry(&p, &p.eta0, &vec![0.0; 33]).unwrap();
        for &x in &[0.0, 0.25, 0.5, 0.8, 1.0] {
            assert_eq!(gm.map_forward(x, 0.0).unwrap().1, 0.0);
            let top = 1.0 + gm.eta_at(x);
            let z = gm.map_forward(x, top).unwrap().1;
            assert!((z - (1.0 + p.at(x))).abs() < 1e-14);
            assert!((same.map_forward(x, 0.7).unwrap().1 - 0.7).abs() < 1e-15);
            assert_eq!(gm.map_inverse(x, 0.0).unwrap().1, 0.0);
            let y = gm.map_inverse(x, 1.0 + p.at(x)).unwrap().1;
            assert!((y - top).abs() < 1e-14);
        }
        assert!(gm.map_forward(1.5, 0.1).is_err());
        assert!(gm.map_inverse(-0.1, 0.1).is_err());
    }

    #[test]
    fn collision_and_dimension_errors() {
        let p = BeamProfile::zero(9, 1.0).unwrap();
        let mut eta = vec![0.0; 9];
        eta[4] = -1.0;
        assert!(matches!(
            build_geometry(&p, &eta, &vec![0.0; 9]),
            Err(FsiError::Collision { .. })
        ));
        assert!(matches!(
            build_geometry(&p, &vec![0.0; 8], &vec![0.0; 9]),
            Err(FsiError::Dimension { .. })
        ));
    }

    #[test]
    fn transport_is_relabel() {
        let p = BeamProfile::bump(9, 1.0, 0.4).unwrap();
        let c = vec![2.5; 9];
        assert_eq!(transport_trace(&p, &c).unwrap(), c);
        let g: Vec<f64> = (0..9).map(|k| (k as f64).cos()).collect();
        let back = transport_trace_inverse(&p, &transport_trace(&p, &g).unwrap()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn profile_validation() {
        assert!(BeamProfile::zero(6, 1.0).is_err());
        assert!(BeamProfile::from_fn(17, 1.0, |x| 0.1 * x).is_err());
        assert!(BeamProfile::from_fn(17, 1.0, |x| -2.0 * bump_shape(x, 1.0)).is_err());
        let poly = BeamProfile::polynomial(17, 1.0, &[0.0, 0.0, 1.6, -3.2, 1.6]).unwrap();
        let bump = BeamProfile::bump(17, 1.0, 0.1).unwrap();
        for k in 0..17 {
            assert!((poly.eta0[k] - bump.eta0[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn third_derivative_stencils() {
        let h = 0.05;
        let f: Vec<f64> = (0..21).map(|k| (k as f64 * h).powi(3)).collect();
        let d3 = fd::dxxx(&f, h);
        for v in &d3 {
            assert!((v - 6.0).abs() < 1e-8, "{v}");
        }
    }
}
