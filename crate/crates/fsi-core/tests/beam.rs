use fsi_core::beam::{
    beam_energy, beam_operator_apply, beam_step, lowest_frequency, operator_matrix, BeamParams, BeamScheme, BeamState,
    BeamStepper,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Dense `beta d_xx - alpha d_xxxx` on the interior nodes, written out from
/// the reflected ghosts `eta[-1] = eta[1]`, `eta[n] = eta[n-2]`.
fn dense_interior(p: &BeamParams) -> DMatrix<f64> {
    let n = p.nodes;
    let m = n - 2;
    let h = p.h();
    let (a, b) = (p.alpha / h.powi(4), p.beta / (h * h));
    let mut full = DMatrix::<f64>::zeros(n, n);
    let reflect = |k: isize| -> usize {
        if k < 0 {
            (-k) as usize
        } else if k > n as isize - 1 {
            (2 * (n as isize - 1) - k) as usize
        } else {
            k as usize
        }
    };
    for k in 1..n - 1 {
        let st = [(-2, -a), (-1, b + 4.0 * a), (0, -2.0 * b - 6.0 * a), (1, b + 4.0 * a), (2, -a)];
        for (off, w) in st {
            full[(k, reflect(k as isize + off))] += w;
        }
    }
    full.view((1, 1), (m, m)).into_owned()
}

fn clamped(n: usize, values: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; n];
    for k in 2..n - 2 {
        v[k] = values[k % values.len()];
    }
    v
}

#[test]
fn operator_matches_dense_stencil() {
    let p = BeamParams::new(1.3, 0.7, 0.1, 1.0, 33).unwrap();
    let d = dense_interior(&p);
    let eta = clamped(33, &[0.3, -0.1, 0.7, 0.2, -0.5]);
    let got = beam_operator_apply(&p, &eta).unwrap();
    for i in 0..31 {
        let want: f64 = (0..31).map(|j| d[(i, j)] * eta[j + 1]).sum();
        assert!((got[i + 1] - want).abs() <= 1e-12 * want.abs().max(1.0), "{i}");
    }
    assert_eq!(got[0], 0.0);
    assert_eq!(got[32], 0.0);
}

#[test]
fn operator_is_second_order() {
    // eta = sin^2(pi x): clamped, eta_xx = 2 pi^2 cos(2 pi x), eta_xxxx = -8 pi^4 cos(2 pi x)
    let pi = std::f64::consts::PI;
    let err = |n: usize| {
        let p = BeamParams::new(1.0, 0.5, 0.1, 1.0, n).unwrap();
        let eta: Vec<f64> = (0..n).map(|k| (pi * p.x(k)).sin().powi(2)).collect();
        let a = beam_operator_apply(&p, &eta).unwrap();
        (1..n - 1)
            .map(|k| {
                let c = (2.0 * pi * p.x(k)).cos();
                let exact = 0.5 * 2.0 * pi * pi * c + 8.0 * pi.powi(4) * c;
                (a[k] - exact).abs()
            })
            .fold(0.0f64, f64::max)
    };
    let (e1, e2, e3) = (err(33), err(65), err(129));
    let o1 = (e1 / e2).log2();
    let o2 = (e2 / e3).log2();
    assert!(o1 > 1.8 && o2 > 1.8, "{e1} {e2} {e3}");
}

#[test]
fn quartic_potential_matches_gauss_quadrature() {
    // eta_xx = 12x^2 - 12x + 2; integrate its square exactly with 3-point Gauss
    let gauss = [(-(0.6f64).sqrt(), 5.0 / 9.0), (0.0, 8.0 / 9.0), ((0.6f64).sqrt(), 5.0 / 9.0)];
    let exact: f64 = gauss
        .iter()
        .map(|(s, w)| {
            let x = 0.5 + 0.5 * s;
            0.5 * w * (12.0 * x * x - 12.0 * x + 2.0).powi(2)
        })
        .sum::<f64>()
        * 0.5;
    let p = BeamParams::new(1.0, 0.0, 0.1, 1.0, 129).unwrap();
    let eta: Vec<f64> = (0..129).map(|k| (p.x(k) * (1.0 - p.x(k))).powi(2)).collect();
    let state = BeamState {
        eta,
        eta_t: vec![0.0; 129],
        t: 0.0,
    };
    let (kin, pot) = beam_energy(&p, &state);
    assert_eq!(kin, 0.0);
    assert!((pot - exact).abs() < 1e-3 * exact, "{pot} vs {exact}");
}

#[test]
fn constant_load_reaches_quartic_deflection() {
    let (alpha, c, n) = (2.0, 1.0, 65);
    let p = BeamParams::new(alpha, 0.0, 1.0, 1.0, n).unwrap();
    let stepper = BeamStepper::new(&p, 1.0, None, BeamScheme::ImplicitEuler).unwrap();
    let load = vec![c; n];
    let mut s = BeamState::zero(n);
    for _ in 0..2000 {
        let next = stepper.step(&s, &load).unwrap();
        let change = next.eta.iter().zip(&s.eta).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        s = next;
        if change < 1e-14 {
            break;
        }
    }
    let peak = c / (24.0 * alpha) / 16.0;
    for k in 0..n {
        let x = p.x(k);
        let exact = c * x * x * (1.0 - x) * (1.0 - x) / (24.0 * alpha);
        assert!((s.eta[k] - exact).abs() <= 0.01 * peak, "{k}: {} vs {exact}", s.eta[k]);
    }
}

#[test]
fn lowest_frequency_matches_dense_eigenvalues() {
    let p = BeamParams::undamped(1.0, 0.3, 1.0, 33).unwrap();
    let ev = (-dense_interior(&p)).symmetric_eigen().eigenvalues;
    let omega = ev.min().sqrt();
    let w = lowest_frequency(&p);
    assert!((w - omega).abs() <= 5e-3 * omega, "{w} vs {omega}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn negative_operator_is_symmetric_positive_definite(
        alpha in 0.1f64..10.0,
        beta in 0.0f64..5.0,
        n in 7usize..40,
    ) {
        let p = BeamParams::new(alpha, beta, 0.1, 1.0, n).unwrap();
        let a = operator_matrix(&p);
        let m = n - 2;
        let k = DMatrix::from_fn(m, m, |i, j| -a.get(i + 1, j + 1));
        let asym = (&k - k.transpose()).amax() / k.amax();
        prop_assert!(asym <= 1e-12);
        prop_assert!(k.cholesky().is_some());
    }

    #[test]
    fn unforced_implicit_step_dissipates(
        seed in proptest::collection::vec(-1.0f64..1.0, 2..8),
        vel in proptest::collection::vec(-1.0f64..1.0, 2..8),
        dt in 1e-4f64..1.0,
        gamma in 0.01f64..2.0,
    ) {
        let n = 21;
        let p = BeamParams::new(1.0, 0.5, gamma, 1.0, n).unwrap();
        let mut s = BeamState { eta: clamped(n, &seed), eta_t: clamped(n, &vel), t: 0.0 };
        let zero = vec![0.0; n];
        let total = |s: &BeamState| { let (k, v) = beam_energy(&p, s); k + v };
        for _ in 0..5 {
            let next = beam_step(&p, &s, &zero, dt, None).unwrap();
            prop_assert!(total(&next) <= total(&s) + 1e-10);
            s = next;
        }
    }

    #[test]
    fn step_keeps_clamped_ends(load in proptest::collection::vec(-5.0f64..5.0, 9)) {
        let p = BeamParams::new(1.0, 0.5, 0.1, 1.0, 9).unwrap();
        let s = beam_step(&p, &BeamState::zero(9), &load, 0.05, None).unwrap();
        prop_assert_eq!(s.eta[0], 0.0);
        prop_assert_eq!(s.eta[8], 0.0);
        prop_assert_eq!(s.eta_t[0], 0.0);
        prop_assert_eq!(s.eta_t[8], 0.0);
    }
}
