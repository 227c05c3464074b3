use fsi_core::geometry::{bump_shape, build_geometry, node_samples, BeamProfile, GeometryMap};
use fsi_core::nonlinear::*;
use fsi_core::stokes::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

const NODES: usize = 25;

/// Smooth test field with random coefficients.
#[derive(Clone, Copy)]
struct Wave {
    c: [f64; 4],
}

impl Wave {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        Self {
            c: [0; 4].map(|_| rng.gen_range(-1.0..1.0)),
        }
    }
    fn at(&self, x: f64, z: f64) -> f64 {
        let c = self.c;
        c[0] * (1.3 * x + 0.4).sin() * (2.1 * z).cos() + c[1] * x * z * z + c[2] * (0.7 * x - 1.1 * z).cos() + c[3] * z
    }
}

fn fill(g: &FluidGrid, f1: &dyn Fn(f64, f64) -> f64, f2: &dyn Fn(f64, f64) -> f64) -> Vec<f64> {
    let mut u = vec![0.0; g.nvel()];
    for j in 0..g.nz {
        for i in 0..=g.nx {
            u[g.u1(i, j)] = f1(g.x_face(i), g.z_center(j));
        }
    }
    for j in 0..=g.nz {
        for i in 0..g.nx {
            u[g.u2(i, j)] = f2(g.x_center(i), g.z_face(j));
        }
    }
    u
}

fn setup(nx: usize, nz: usize, l: f64, amp0: f64, amp: f64, vel: f64) -> (Operators, BeamProfile, GeometryMap) {
    let profile = BeamProfile::bump(NODES, l, amp0).unwrap();
    let eta: Vec<f64> = profile
        .eta0
        .iter()
        .zip(node_samples(NODES, l, |x| amp * bump_shape(x, l) * (1.0 + 0.3 * (3.0 * x).sin())))
        .map(|(a, b)| a + b)
        .collect();
    let eta_t = node_samples(NODES, l, |x| vel * bump_shape(x, l));
    let gm = build_geometry(&profile, &eta, &eta_t).unwrap();
    let g = FluidGrid::new(nx, nz, l).unwrap();
    let ops = Operators::new(&g, &Metric::new(&g, &profile).unwrap());
    (ops, profile, gm)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Interior reference derivatives of an analytic lattice function by
/// explicit differencing of shifted samples.
struct Oracle {
    hx: f64,
    hz: f64,
}

struct D {
    v: f64,
    x: f64,
    z: f64,
    xx: f64,
    xz: f64,
    zz: f64,
}

impl Oracle {
    fn derivs(&self, f: &dyn Fn(f64, f64) -> f64, x: f64, zp: f64, s: &fsi_core::geometry::GeomSample) -> D {
        let (hx, hz) = (self.hx, self.hz);
        let fx = (f(x + hx, zp) - f(x - hx, zp)) / (2.0 * hx);
        let fz = (f(x, zp + hz) - f(x, zp - hz)) / (2.0 * hz);
        let fxx = (f(x + hx, zp) - 2.0 * f(x, zp) + f(x - hx, zp)) / (hx * hx);
        let fzz = (f(x, zp + hz) - 2.0 * f(x, zp) + f(x, zp - hz)) / (hz * hz);
        let fxz = (f(x + hx, zp + hz) - f(x + hx, zp - hz) - f(x - hx, zp + hz) + f(x - hx, zp - hz)) / (4.0 * hx * hz);
        let jac = 1.0 + s.eta0;
        let a = s.eta0_x / jac;
        let ax = s.eta0_xx / jac - s.eta0_x * s.eta0_x / (jac * jac);
        // z' = z / J(x): d/dx|z = d/dx' + (dz'/dx) d/dz' with dz'/dx = -a z'.
        D {
            v: f(x, zp),
            x: fx - a * zp * fz,
            z: fz / jac,
            xx: fxx - 2.0 * a * zp * fxz + a * a * zp * zp * fzz + (a * a - ax) * zp * fz,
            xz: (fxz - a * fz - a * zp * fzz) / jac,
            zz: fzz / (jac * jac),
        }
    }
}

#[test]
fn collapse_when_geometry_is_reference() {
    let (ops, profile, _) = setup(16, 12, 1.5, 0.2, 0.0, 0.0);
    let g = ops.grid;
    let gm = build_geometry(&profile, &profile.eta0, &vec![0.0; NODES]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (a, b) = (Wave::random(&mut rng), Wave::random(&mut rng));
    let u = fill(&g, &|x, z| a.at(x, z), &|x, z| b.at(x, z));
    let u_prev = fill(&g, &|x, z| 0.9 * a.at(x, z), &|x, z| 1.1 * b.at(x, z));
    let p: Vec<f64> = (0..g.ncell()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    assert!(max_abs(&eval_w(&g, &gm, &u).unwrap()) <= 1e-14);
    assert!(max_abs(&eval_n(&g, &gm, &u).unwrap()) <= 1e-14);
    let f = eval_f(&ops, Level { gm: &gm, u: &u }, Level { gm: &gm, u: &u_prev }, &p, 0.01, 0.7).unwrap();
    let terms = g_terms(&ops, &gm, &u, &u_prev, &p, 0.01, 0.7).unwrap();
    for v in [&terms.time, &terms.drift, &terms.viscous, &terms.pressure] {
        assert!(max_abs(v) <= 1e-14);
    }
    // Plain convection, checked on interior faces against shifted samples.
    let o = Oracle { hx: g.hx, hz: g.hz };
    let scale = max_abs(&f).max(1.0);
    for j in 1..g.nz - 1 {
        for i in 1..g.nx {
            let x = g.x_face(i);
            let s = gm.at(x);
            let zp = g.z_center(j);
            let d = o.derivs(&|x, z| a.at(x, z), x, zp, &s);
            let u2 = 0.25
                * (b.at(x - 0.5 * g.hx, zp - 0.5 * g.hz)
                    + b.at(x + 0.5 * g.hx, zp - 0.5 * g.hz)
                    + b.at(x - 0.5 * g.hx, zp + 0.5 * g.hz)
                    + b.at(x + 0.5 * g.hx, zp + 0.5 * g.hz));
            let conv = -d.v * d.x - u2 * d.z;
            assert!((f[g.u1(i, j)] - conv).abs() <= 1e-12 * scale, "({i},{j})");
        }
    }
    for j in 2..g.nz - 1 {
        for i in 1..g.nx - 1 {
            let x = g.x_center(i);
            let s = gm.at(x);
            let zp = g.z_face(j);
            let d = o.derivs(&|x, z| b.at(x, z), x, zp, &s);
            let u1 = 0.25
                * (a.at(x - 0.5 * g.hx, zp - 0.5 * g.hz)
                    + a.at(x + 0.5 * g.hx, zp - 0.5 * g.hz)
                    + a.at(x - 0.5 * g.hx, zp + 0.5 * g.hz)
                    + a.at(x + 0.5 * g.hx, zp + 0.5 * g.hz));
            let conv = -u1 * d.x - d.v * d.z;
            assert!((f[g.u2(i, j)] - conv).abs() <= 1e-12 * scale, "({i},{j})");
        }
    }
}

#[test]
fn w_matches_pointwise_formula_rect() {
    let l = 1.0;
    let profile = BeamProfile::zero(NODES, l).unwrap();
    let eta = node_samples(NODES, l, |x| 0.1 * (PI * x / l).sin().powi(2));
    let gm = build_geometry(&profile, &eta, &vec![0.0; NODES]).unwrap();
    let g = FluidGrid::new(9, 9, l).unwrap();
    let mut u = vec![0.0; g.nvel()];
    for j in 0..g.nz {
        for i in 0..=g.nx {
            u[g.u1(i, j)] = 1.0;
        }
    }
    let w = eval_w(&g, &gm, &u).unwrap();
    for j in 0..g.nz {
        for i in 0..=g.nx {
            let s = gm.at(g.x_face(i));
            assert!((w[g.u1(i, j)] + s.tilde).abs() <= 1e-15);
            let exact = 0.1 * (PI * g.x_face(i) / l).sin().powi(2);
            assert!((w[g.u1(i, j)] + exact).abs() <= 1e-2);
        }
    }
    for j in 0..=g.nz {
        for i in 0..g.nx {
            let s = gm.at(g.x_center(i));
            let u1 = if j == 0 || j == g.nz { 0.0 } else { 1.0 };
            let expect = g.z_face(j) * s.tilde_x * u1;
            assert!((w[g.u2(i, j)] - expect).abs() <= 1e-15);
        }
    }
    // w vanishes on the whole boundary.
    for j in 0..g.nz {
        assert!(w[g.u1(0, j)].abs() <= 1e-15 && w[g.u1(g.nx, j)].abs() <= 1e-15);
    }
}

#[test]
fn zero_velocity_gives_zero_w() {
    let (ops, _, gm) = setup(12, 10, 1.0, 0.1, 0.05, 0.3);
    let g = ops.grid;
    assert!(eval_w(&g, &gm, &vec![0.0; g.nvel()]).unwrap().iter().all(|v| *v == 0.0));
}

#[test]
fn m_is_u_plus_n_and_matches_formula() {
    let (ops, _, gm) = setup(9, 9, 1.2, 0.15, -0.07, 0.0);
    let g = ops.grid;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u: Vec<f64> = (0..g.nvel()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let m = eval_m(&g, &gm, &u).unwrap();
    let n = eval_n(&g, &gm, &u).unwrap();
    for k in 0..g.nvel() {
        assert!((m[k] - u[k] - n[k]).abs() <= 1e-15);
    }
    for j in 0..g.nz {
        for i in 0..=g.nx {
            let t = gm.at(g.x_face(i)).tilde;
            let k = g.u1(i, j);
            assert!((m[k] - u[k] / (1.0 + t)).abs() <= 1e-15);
        }
    }
    for j in 1..g.nz {
        for i in 0..g.nx {
            let s = gm.at(g.x_center(i));
            let z = (1.0 + s.eta0) * g.z_face(j);
            let u1 = 0.25 * (u[g.u1(i, j - 1)] + u[g.u1(i + 1, j - 1)] + u[g.u1(i, j)] + u[g.u1(i + 1, j)]);
            let k = g.u2(i, j);
            assert!((m[k] - (z * s.tilde_x * u1 / (1.0 + s.tilde) + u[k])).abs() <= 1e-14);
        }
    }
}

#[test]
fn m_is_identity_without_horizontal_velocity() {
    let (ops, _, gm) = setup(12, 10, 1.0, 0.1, 0.08, 0.0);
    let g = ops.grid;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut u = vec![0.0; g.nvel()];
    for k in g.nvf()..g.nvel() {
        u[k] = rng.gen_range(-1.0..1.0);
    }
    assert_eq!(eval_m(&g, &gm, &u).unwrap(), u);
}

#[test]
fn g_terms_match_independent_oracle() {
    let (ops, _, gm) = setup(16, 14, 1.4, 0.12, 0.06, 0.4);
    let g = ops.grid;
    let nu = 0.3;
    let dt = 0.02;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (a, b, c) = (Wave::random(&mut rng), Wave::random(&mut rng), Wave::random(&mut rng));
    let u = fill(&g, &|x, z| a.at(x, z), &|x, z| b.at(x, z));
    let u_prev = fill(&g, &|x, z| a.at(x, z) - 0.05 * z, &|x, z| b.at(x, z) + 0.02 * x);
    let mut p = vec![0.0; g.ncell()];
    for j in 0..g.nz {
        for i in 0..g.nx {
            p[g.cell(i, j)] = c.at(g.x_center(i), g.z_center(j));
        }
    }
    let terms = g_terms(&ops, &gm, &u, &u_prev, &p, dt, nu).unwrap();
    let o = Oracle { hx: g.hx, hz: g.hz };
    let avg = |w: &Wave, x: f64, z: f64| {
        0.25 * (w.at(x - 0.5 * g.hx, z - 0.5 * g.hz)
            + w.at(x + 0.5 * g.hx, z - 0.5 * g.hz)
            + w.at(x - 0.5 * g.hx, z + 0.5 * g.hz)
            + w.at(x + 0.5 * g.hx, z + 0.5 * g.hz))
    };
    let check = |k: usize, got: [f64; 4], want: [f64; 4]| {
        for q in 0..4 {
            let tol = 1e-12 * want[q].abs().max(1.0);
            assert!((got[q] - want[q]).abs() <= tol, "face {k} group {q}: {} vs {}", got[q], want[q]);
        }
    };
    let mut checked = 0;
    for j in 1..g.nz - 1 {
        for i in 1..g.nx {
            let x = g.x_face(i);
            let zp = g.z_center(j);
            let s = gm.at(x);
            let z = (1.0 + s.eta0) * zp;
            let d = o.derivs(&|x, z| a.at(x, z), x, zp, &s);
            let u2 = avg(&b, x, zp);
            let ut = (u[g.u1(i, j)] - u_prev[g.u1(i, j)]) / dt;
            let t = s.tilde;
            let tx = s.tilde_x;
            let time = -t * ut;
            let drift = (z * s.tilde_t + nu * z * (tx * tx / (1.0 + t) - s.tilde_xx)) * d.z;
            let visc = nu * (-2.0 * z * tx * d.xz + t * d.xx + (z * z * tx * tx - t) / (1.0 + t) * d.zz);
            let conv = -(1.0 + t) * d.v * d.x + (z * tx * d.v - u2) * d.z;
            // Pressure: cell-centered differences, averaged in z'.
            let jac = 1.0 + s.eta0;
            let aa = s.eta0_x / jac;
            let (xl, xr) = (x - 0.5 * g.hx, x + 0.5 * g.hx);
            let pxp = (c.at(xr, zp) - c.at(xl, zp)) / g.hx;
            let pzp = (c.at(xl, zp + g.hz) - c.at(xl, zp - g.hz) + c.at(xr, zp + g.hz) - c.at(xr, zp - g.hz)) / (4.0 * g.hz);
            let px = pxp - aa * zp * pzp;
            let pz = pzp / jac;
            let pres = z * (tx * pz - t * px);
            let k = g.u1(i, j);
            check(k, [terms.time[k], terms.drift[k], terms.viscous[k], terms.convection[k]], [time, drift, visc, conv]);
            assert!((terms.pressure[k] - pres).abs() <= 1e-12 * pres.abs().max(1.0));
            checked += 1;
        }
    }
    for j in 2..g.nz - 1 {
        for i in 1..g.nx - 1 {
            let x = g.x_center(i);
            let zp = g.z_face(j);
            let s = gm.at(x);
            let z = (1.0 + s.eta0) * zp;
            let d = o.derivs(&|x, z| b.at(x, z), x, zp, &s);
            let u1 = avg(&a, x, zp);
            let k = g.u2(i, j);
            let ut = (u[k] - u_prev[k]) / dt;
            let t = s.tilde;
            let tx = s.tilde_x;
            let want = [
                -t * ut,
                (z * s.tilde_t + nu * z * (tx * tx / (1.0 + t) - s.tilde_xx)) * d.z,
                nu * (-2.0 * z * tx * d.xz + t * d.xx + (z * z * tx * tx - t) / (1.0 + t) * d.zz),
                -(1.0 + t) * u1 * d.x + (z * tx * u1 - d.v) * d.z,
            ];
            check(k, [terms.time[k], terms.drift[k], terms.viscous[k], terms.convection[k]], want);
            assert_eq!(terms.pressure[k], 0.0);
            checked += 1;
        }
    }
    assert!(checked > 200);
    for k in g.top_faces().into_iter().chain(g.bottom_faces()) {
        assert_eq!(terms.total()[k], 0.0);
    }
}

#[test]
fn g_of_zero_velocity_is_pressure_group() {
    let (ops, _, gm) = setup(12, 10, 1.0, 0.1, 0.05, 0.2);
    let g = ops.grid;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let p: Vec<f64> = (0..g.ncell()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let zero = vec![0.0; g.nvel()];
    let terms = g_terms(&ops, &gm, &zero, &zero, &p, 0.1, 1.0).unwrap();
    assert_eq!(terms.total(), terms.pressure);
    assert!(max_abs(&terms.pressure) > 0.0);
    assert!(terms.pressure[g.nvf()..].iter().all(|v| *v == 0.0));
}

#[test]
fn psi_vanishes_for_divergence_free_no_slip_rect() {
    // Discrete stream function: exactly divergence free, u1 = 0 and u2 = 0 on top.
    let nu = 0.8;
    let mut prev = f64::INFINITY;
    for n in [16, 32, 64] {
        let l = 1.0;
        let profile = BeamProfile::zero(NODES, l).unwrap();
        let gm = build_geometry(&profile, &vec![0.0; NODES], &vec![0.0; NODES]).unwrap();
        let g = FluidGrid::new(n, n, l).unwrap();
        let ops = Operators::new(&g, &Metric::flat(&g));
        let psi = |x: f64, z: f64| (PI * x).sin().powi(2) * z * z * (1.0 - z) * (1.0 - z);
        let mut u = vec![0.0; g.nvel()];
        for j in 0..g.nz {
            for i in 0..=g.nx {
                u[g.u1(i, j)] = (psi(g.x_face(i), g.z_face(j + 1)) - psi(g.x_face(i), g.z_face(j))) / g.hz;
            }
        }
        for j in 0..=g.nz {
            for i in 0..g.nx {
                u[g.u2(i, j)] = -(psi(g.x_face(i + 1), g.z_face(j)) - psi(g.x_face(i), g.z_face(j))) / g.hx;
            }
        }
        assert!(ops.max_divergence(&u) <= 1e-12);
        let f = psi_faces(&ops, &gm, &u, nu).unwrap();
        let err = max_abs(&f);
        // Vanishes up to the O(h^2) error of the one-sided trace.
        assert!(err <= 40.0 * nu * g.hz * g.hz, "{err}");
        assert!(prev / err >= 3.5, "{prev} -> {err}");
        prev = err;
        let tr = Transfer::new(&g, NODES).unwrap();
        let h = eval_h(&ops, &tr, &gm, &u, nu).unwrap();
        assert!(max_abs(&h) <= 40.0 * nu * g.hz * g.hz);
    }
}

#[test]
fn psi_of_zero_is_zero() {
    let (ops, _, gm) = setup(12, 10, 1.0, 0.1, 0.05, 0.2);
    let tr = Transfer::new(&ops.grid, NODES).unwrap();
    let h = eval_psi(&ops, &tr, &gm, &vec![0.0; ops.grid.nvel()], 1.0).unwrap();
    assert!(h.iter().all(|v| *v == 0.0));
}

#[test]
fn psi_matches_pointwise_oracle() {
    let (ops, _, gm) = setup(9, 9, 1.1, 0.1, 0.04, 0.0);
    let g = ops.grid;
    let nu = 0.6;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let u: Vec<f64> = (0..g.nvel()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let f = psi_faces(&ops, &gm, &u, nu).unwrap();
    let nz = g.nz;
    for i in 0..g.nx {
        let s = gm.at(g.x_center(i));
        let jac = 1.0 + s.eta0;
        let a = s.eta0_x / jac;
        // Samples at h/2 and 3h/2 below the wall, value zero on it.
        let f1 = 0.5 * (u[g.u1(i, nz - 1)] + u[g.u1(i + 1, nz - 1)]);
        let f2 = 0.5 * (u[g.u1(i, nz - 2)] + u[g.u1(i + 1, nz - 2)]);
        let u1z = -(9.0 * f1 - f2) / (3.0 * g.hz) / jac;
        let right = if i + 1 < g.nx { u[g.u2(i + 1, nz)] } else { -u[g.u2(i, nz)] };
        let left = if i > 0 { u[g.u2(i - 1, nz)] } else { -u[g.u2(i, nz)] };
        let d2z = (3.0 * u[g.u2(i, nz)] - 4.0 * u[g.u2(i, nz - 1)] + u[g.u2(i, nz - 2)]) / (2.0 * g.hz);
        let u2x = (right - left) / (2.0 * g.hx) - a * d2z;
        let u2z = d2z / jac;
        let t = s.tilde;
        let want = nu * (s.eta_x / (1.0 + t) * u1z + s.eta_x * u2x - (jac * s.tilde_x * s.eta_x - 2.0) / (1.0 + t) * u2z);
        assert!((f[i] - want).abs() <= 1e-12 * want.abs().max(1.0), "{i}");
    }
}

#[test]
fn theta_is_minus_half_speed_squared() {
    let g = FluidGrid::new(10, 8, 1.0).unwrap();
    let (ti, to) = eval_theta(&g, &vec![0.0; g.nvel()]).unwrap();
    assert!(ti.iter().chain(&to).all(|v| *v == 0.0));
    let c = 1.7;
    let u = fill(&g, &|_, _| c, &|_, _| 0.0);
    let (ti, _) = eval_theta(&g, &u).unwrap();
    assert!(ti.iter().all(|v| (v + 0.5 * c * c).abs() <= 1e-15));
    let prof = |z: f64| 4.0 * z * (1.0 - z);
    let u = fill(&g, &|_, z| prof(z), &|_, _| 0.0);
    let (ti, to) = eval_theta(&g, &u).unwrap();
    for j in 0..g.nz {
        let want = -0.5 * prof(g.z_center(j)).powi(2);
        assert!((ti[j] - want).abs() <= 1e-15 && (to[j] - want).abs() <= 1e-15);
    }
    // Midpoint quadrature of the inlet data converges to -4/15.
    let q: f64 = ti.iter().sum::<f64>() * g.hz;
    assert!((q + 4.0 / 15.0).abs() <= 1e-2);
}

#[test]
fn f_is_zero_for_zero_state() {
    let (ops, _, gm) = setup(12, 10, 1.0, 0.1, 0.05, 0.2);
    let g = ops.grid;
    let z = vec![0.0; g.nvel()];
    let f = eval_f(&ops, Level { gm: &gm, u: &z }, Level { gm: &gm, u: &z }, &vec![0.0; g.ncell()], 0.1, 1.0).unwrap();
    assert!(f.iter().all(|v| *v == 0.0));
}

#[test]
fn f_is_the_documented_composite() {
    let (ops, profile, gm) = setup(16, 12, 1.3, 0.1, 0.05, 0.3);
    let g = ops.grid;
    let eta_prev: Vec<f64> = gm.eta.iter().zip(&gm.eta_t).map(|(e, v)| e - 0.02 * v).collect();
    let gm_prev = build_geometry(&profile, &eta_prev, &gm.eta_t).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (a, b) = (Wave::random(&mut rng), Wave::random(&mut rng));
    let u = fill(&g, &|x, z| a.at(x, z), &|x, z| b.at(x, z));
    let up = fill(&g, &|x, z| 0.95 * a.at(x, z), &|x, z| b.at(x, z) - 0.01);
    let p: Vec<f64> = (0..g.ncell()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let (dt, nu) = (0.02, 0.4);
    let f = eval_f(&ops, Level { gm: &gm, u: &u }, Level { gm: &gm_prev, u: &up }, &p, dt, nu).unwrap();
    let mh = eval_m(&g, &gm, &u).unwrap();
    let mp = eval_m(&g, &gm_prev, &up).unwrap();
    let gg = eval_g(&ops, &gm, &mh, &mp, &p, dt, nu).unwrap();
    let n = eval_n(&g, &gm, &u).unwrap();
    let np = eval_n(&g, &gm_prev, &up).unwrap();
    let lap = ops.lap.matvec(&n);
    let scale = max_abs(&f);
    for k in 0..g.nvel() {
        let want = if g.is_wall_face(k) { 0.0 } else { gg[k] - (n[k] - np[k]) / dt + nu * lap[k] };
        assert!((f[k] - want).abs() <= 1e-12 * scale);
    }
}

#[test]
fn relative_displacement_shrinks_with_horizon() {
    // eta - eta0 = t^2 q(x) has bounded eta_t on [0, 1]; max |eta~| scales like T^2 <= C T^{1/2}.
    let profile = BeamProfile::bump(NODES, 1.0, 0.1).unwrap();
    let q = node_samples(NODES, 1.0, |x| bump_shape(x, 1.0));
    let mut sizes = Vec::new();
    let mut t_end = 0.8;
    for _ in 0..4 {
        let levels: Vec<GeometryMap> = (0..=8)
            .map(|n| {
                let t = t_end * n as f64 / 8.0;
                let eta: Vec<f64> = profile.eta0.iter().zip(&q).map(|(e, v)| e + t * t * v).collect();
                let eta_t: Vec<f64> = q.iter().map(|v| 2.0 * t * v).collect();
                build_geometry(&profile, &eta, &eta_t).unwrap()
            })
            .collect();
        sizes.push(max_relative_displacement(&levels));
        t_end *= 0.5;
    }
    for w in sizes.windows(2) {
        let slope = (w[0] / w[1]).log2();
        assert!(slope >= 0.4, "{slope}");
    }
}

#[test]
fn bundle_shapes_and_sum() {
    let g = FluidGrid::new(8, 8, 1.0).unwrap();
    let z = RhsBundle::zero(&g, 9, 3);
    z.check(&g, 9).unwrap();
    let mut one = z.clone();
    one.levels[1].h[4] = 2.0;
    let s = one.plus(&one).unwrap();
    assert_eq!(s.levels[1].h[4], 4.0);
    assert!(z.plus(&RhsBundle::zero(&g, 9, 2)).is_err());
    let mut bad = z.clone();
    bad.levels[0].f[0] = f64::NAN;
    assert!(bad.check(&g, 9).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn n_is_linear_and_w_vanishes_on_boundary(seed in 0u64..10_000, amp in -0.3f64..0.3, s in -3.0f64..3.0) {
        let (ops, _, gm) = setup(10, 8, 1.0, 0.1, amp, 0.0);
        let g = ops.grid;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<f64> = (0..g.nvel()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..g.nvel()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let comb: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + s * b).collect();
        let nu_ = eval_n(&g, &gm, &u).unwrap();
        let nv = eval_n(&g, &gm, &v).unwrap();
        let nc = eval_n(&g, &gm, &comb).unwrap();
        for k in 0..g.nvel() {
            prop_assert!((nc[k] - nu_[k] - s * nv[k]).abs() <= 1e-13);
        }
        let m = eval_m(&g, &gm, &u).unwrap();
        for k in 0..g.nvel() {
            prop_assert!((m[k] - u[k] - nu_[k]).abs() <= 1e-15);
        }
        let w = eval_w(&g, &gm, &u).unwrap();
        for k in g.top_faces().into_iter().chain(g.bottom_faces()) {
            prop_assert!(w[k].abs() <= 1e-15);
        }
        for j in 0..g.nz {
            prop_assert!(w[g.u1(0, j)].abs() <= 1e-15 && w[g.u1(g.nx, j)].abs() <= 1e-15);
        }
    }
}
