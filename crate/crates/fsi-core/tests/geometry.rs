use fsi_core::geometry::{build_geometry, bump_shape, transport_trace, transport_trace_inverse, BeamProfile, Mode};
use proptest::prelude::*;

fn clamped_bump(n: usize, amp: f64) -> Vec<f64> {
    let h = 1.0 / (n - 1) as f64;
    (0..n).map(|k| amp * bump_shape(k as f64 * h, 1.0)).collect()
}

#[test]
fn modes_follow_the_profile() {
    assert_eq!(BeamProfile::zero(9, 1.0).unwrap().mode(), Mode::Rect);
    assert_eq!(BeamProfile::bump(9, 1.0, 0.1).unwrap().mode(), Mode::Graph);
}

#[test]
fn rect_and_graph_agree_on_the_physical_domain() {
    // the same current beam seen from a flat and a curved reference
    let n = 33;
    let eta = clamped_bump(n, 0.3);
    let flat = build_geometry(&BeamProfile::zero(n, 1.0).unwrap(), &eta, &vec![0.0; n]).unwrap();
    let curved = build_geometry(&BeamProfile::bump(n, 1.0, 0.2).unwrap(), &eta, &vec![0.0; n]).unwrap();
    for k in 0..n {
        let x = k as f64 / (n - 1) as f64;
        let top = 1.0 + eta[k];
        let (_, zf) = flat.map_forward(x, top).unwrap();
        let (_, zc) = curved.map_forward(x, top).unwrap();
        assert!((zf - 1.0).abs() < 1e-12);
        assert!((zc - (1.0 + 0.2 * bump_shape(x, 1.0))).abs() < 1e-12);
        assert!((flat.gap() - curved.gap()).abs() < 1e-15);
    }
}

#[test]
fn reference_equal_to_current_has_zero_tilde() {
    let p = BeamProfile::bump(17, 1.0, 0.4).unwrap();
    let g = build_geometry(&p, &p.eta0, &vec![0.0; 17]).unwrap();
    assert!(g.tilde.iter().all(|v| v.abs() < 1e-15));
    assert!(g.tilde_xx.iter().all(|v| v.abs() < 1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forward_inverse_round_trip(
        a0 in -0.5f64..0.5,
        a in -0.5f64..0.5,
        x in 0.0f64..1.0,
        s in 0.0f64..1.0,
    ) {
        let n = 25;
        let p = BeamProfile::bump(n, 1.0, a0).unwrap();
        let g = build_geometry(&p, &clamped_bump(n, a), &vec![0.0; n]).unwrap();
        let y = s * (1.0 + g.eta_at(x));
        let (x1, z) = g.map_forward(x, y).unwrap();
        let (x2, y2) = g.map_inverse(x1, z).unwrap();
        prop_assert_eq!(x2, x);
        prop_assert!((y2 - y).abs() <= 1e-12);
        prop_assert!(z >= 0.0 && z <= (1.0 + p.at(x)) * (1.0 + 1e-12));
    }

    #[test]
    fn tilde_is_the_relative_displacement(
        a0 in -0.5f64..0.5,
        a in -0.5f64..0.5,
    ) {
        let n = 21;
        let p = BeamProfile::bump(n, 1.0, a0).unwrap();
        let eta = clamped_bump(n, a);
        let g = build_geometry(&p, &eta, &eta).unwrap();
        for k in 0..n {
            let want = (eta[k] - p.eta0[k]) / (1.0 + p.eta0[k]);
            prop_assert!((g.tilde[k] - want).abs() <= 1e-14);
            prop_assert!((g.tilde_t[k] * (1.0 + p.eta0[k]) - eta[k]).abs() <= 1e-14);
        }
    }

    #[test]
    fn trace_transport_round_trip(v in proptest::collection::vec(-10.0f64..10.0, 9)) {
        let p = BeamProfile::bump(9, 2.0, 0.3).unwrap();
        let t = transport_trace(&p, &v).unwrap();
        prop_assert_eq!(transport_trace_inverse(&p, &t).unwrap(), v);
    }

    #[test]
    fn collapsed_beam_is_rejected(depth in 1.0f64..3.0) {
        let n = 11;
        let p = BeamProfile::zero(n, 1.0).unwrap();
        let mut eta = vec![0.0; n];
        eta[5] = -depth;
        prop_assert!(build_geometry(&p, &eta, &vec![0.0; n]).is_err());
    }
}
