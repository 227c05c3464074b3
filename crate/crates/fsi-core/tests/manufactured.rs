use fsi_core::linalg::SolverOptions;
use fsi_core::oracles::suite::*;
use fsi_core::coupling::PicardStatus;

#[test]
fn coupled_space_order() {
    let r = coupled_space_row(&SuiteConfig::default()).unwrap();
    eprintln!("{r:?}");
    assert!(r.passed(), "{r:?}");
}

#[test]
fn coupled_time_order() {
    let r = coupled_time_row(&SuiteConfig::default()).unwrap();
    eprintln!("{r:?}");
    assert!(r.passed(), "{r:?}");
}

#[test]
fn reference_state_collapses() {
    let r = reference_collapse(16, 0.3, SolverOptions::default()).unwrap();
    eprintln!("{:?}", r.residuals);
    assert_eq!(r.status, PicardStatus::Converged);
    assert!(r.iterations <= 2, "{}", r.iterations);
}

use fsi_core::oracles::{CoupledCase, TimeProfile};

fn sine_case() -> CoupledCase {
    CoupledCase {
        nu: 0.07,
        alpha: 1.3,
        beta: 0.4,
        gamma: 0.2,
        length: 1.7,
        time: TimeProfile::Sine { amp: 0.8, omega: 3.0 },
    }
}

#[test]
fn coupled_case_boundary_values() {
    let c = sine_case();
    let t = 0.37;
    for k in 0..=10 {
        let x = c.length * k as f64 / 10.0;
        let (b1, b2) = c.velocity(x, 0.0, t);
        assert!(b1.abs() < 1e-14 && b2.abs() < 1e-14);
        let (t1, t2) = c.velocity(x, 1.0, t);
        assert!(t1.abs() < 1e-14);
        assert!((t2 - c.eta(x, t).1).abs() < 1e-14);
        let z = k as f64 / 10.0;
        assert!(c.velocity(0.0, z, t).1.abs() < 1e-14);
        assert!(c.velocity(c.length, z, t).1.abs() < 1e-14);
    }
    assert!(c.eta(0.0, t).0.abs() < 1e-14 && c.eta(c.length, t).0.abs() < 1e-14);
}

/// Forcings rebuilt from finite differences of the closed-form fields.
#[test]
fn coupled_case_forcing_matches_differences() {
    let c = sine_case();
    let h = 1e-3;
    let t = 0.61;
    let u = |x: f64, z: f64, t: f64| c.velocity(x, z, t);
    for &(x, z) in &[(0.3, 0.2), (1.1, 0.7), (0.85, 0.5)] {
        let ut = ((u(x, z, t + h).0 - u(x, z, t - h).0) / (2.0 * h), (u(x, z, t + h).1 - u(x, z, t - h).1) / (2.0 * h));
        let lap = |k: usize| {
            let g = |x: f64, z: f64| if k == 0 { u(x, z, t).0 } else { u(x, z, t).1 };
            (g(x + h, z) + g(x - h, z) + g(x, z + h) + g(x, z - h) - 4.0 * g(x, z)) / (h * h)
        };
        let px = (c.pressure(x + h, z, t) - c.pressure(x - h, z, t)) / (2.0 * h);
        let pz = (c.pressure(x, z + h, t) - c.pressure(x, z - h, t)) / (2.0 * h);
        let f = c.force(x, z, t);
        assert!((f.0 - (ut.0 - c.nu * lap(0) + px)).abs() < 1e-4, "{f:?}");
        assert!((f.1 - (ut.1 - c.nu * lap(1) + pz)).abs() < 1e-4, "{f:?}");
        let div = (u(x + h, z, t).0 - u(x - h, z, t).0 + u(x, z + h, t).1 - u(x, z - h, t).1) / (2.0 * h);
        assert!(div.abs() < 1e-6);
    }
    let e = |x: f64, t: f64| c.eta(x, t).0;
    for &x in &[0.2, 0.9, 1.4] {
        let hb = 1e-2;
        let tt = (e(x, t + h) - 2.0 * e(x, t) + e(x, t - h)) / (h * h);
        let xx = |t: f64| (e(x + hb, t) - 2.0 * e(x, t) + e(x - hb, t)) / (hb * hb);
        let txx = (xx(t + h) - xx(t - h)) / (2.0 * h);
        let x4 = (e(x + 2.0 * hb, t) - 4.0 * e(x + hb, t) + 6.0 * e(x, t) - 4.0 * e(x - hb, t) + e(x - 2.0 * hb, t))
            / hb.powi(4);
        let want = tt - c.beta * xx(t) - c.gamma * txx + c.alpha * x4 - c.pressure(x, 1.0, t);
        assert!((c.load(x, t) - want).abs() < 1e-3, "{} {want}", c.load(x, t));
    }
}

#[test]
fn linear_profile_is_exact_at_the_initial_time() {
    let pr = case_problem(&COUPLED_SPACE, 8, SolverOptions::default()).unwrap();
    let s = COUPLED_SPACE.state(&pr, 0.0).unwrap();
    let (eu, ee) = COUPLED_SPACE.errors(&pr, &s).unwrap();
    assert_eq!(ee, 0.0);
    assert!(eu < 1e-2, "{eu}");
}

#[test]
fn suite_rows_pass() {
    let rows = fsi_core::oracles::manufactured_suite(&SuiteConfig::default()).unwrap();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert!(r.passed(), "{r:?}");
    }
}
