use fsi_core::beam::{BeamParams, BeamState};
use fsi_core::coupling::*;
use fsi_core::geometry::{bump_shape, node_samples, BeamProfile};
use fsi_core::linalg::SolverOptions;
use fsi_core::nonlinear::{RhsBundle, RhsLevel};
use fsi_core::stokes::FluidGrid;
use fsi_core::FsiError;

fn problem(nx: usize, nz: usize, nb: usize, length: f64, profile: Option<BeamProfile>) -> CoupledProblem {
    let g = FluidGrid::new(nx, nz, length).unwrap();
    let profile = profile.unwrap_or_else(|| BeamProfile::zero(nb, length).unwrap());
    let beam = BeamParams::new(1.0, 0.5, 0.1, length, nb).unwrap();
    CoupledProblem::new(&g, &profile, 0.05, beam, SolverOptions::default()).unwrap()
}

fn load_bundle(pr: &CoupledProblem, c: f64, steps: usize) -> RhsBundle {
    let mut level = RhsLevel::zero(pr.grid(), pr.nodes());
    for k in 1..pr.nodes() - 1 {
        level.h[k] = c;
    }
    RhsBundle {
        levels: vec![level; steps],
    }
}

fn max_diff(a: &Trajectory, b: &Trajectory) -> f64 {
    a.diff(b).unwrap().max_abs()
}

/// Compatible state with beam velocity `amp * bump` and the lifted fluid.
fn bump_state(pr: &CoupledProblem, amp: f64) -> CoupledState {
    let n = pr.nodes();
    let l = pr.grid().length;
    let beam = BeamState {
        eta: pr.profile.eta0.clone(),
        eta_t: node_samples(n, l, |x| amp * bump_shape(x, l)),
        t: 0.0,
    };
    prepare_initial(pr, &vec![0.0; pr.grid().nvel()], &beam).unwrap().state
}

#[test]
fn zero_data_gives_zero_trajectory() {
    let pr = problem(12, 10, 13, 1.0, None);
    let x0 = CoupledState::zero(&pr);
    let traj = linear_coupled_solve(&pr, &x0, &RhsBundle::zero(pr.grid(), 13, 4), 0.01).unwrap();
    assert_eq!(traj.states.len(), 5);
    assert_eq!(traj.max_abs(), 0.0);
    let (s, _) = partitioned_step(&pr, &x0, &RhsLevel::zero(pr.grid(), 13), 0.01, PartitionedConfig::default()).unwrap();
    assert_eq!(s.max_abs(), 0.0);
}

#[test]
fn top_flux_of_a_wall_velocity_matches_the_elliptic_injection() {
    let pr = problem(8, 8, 9, 1.0, Some(BeamProfile::bump(9, 1.0, 0.2).unwrap()));
    let g = pr.grid();
    for i in [0, 3, 7] {
        let mut u = vec![0.0; g.nvel()];
        u[g.u2(i, g.nz)] = 1.0;
        let a = pr.ops.div_u.matvec(&u);
        let mut q = vec![0.0; 2 * g.nx];
        q[g.nx + i] = 1.0;
        let b = pr.ops.wall_flux.matvec(&q);
        let d = a.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(d < 1e-12, "{d}");
    }
}

#[test]
fn monolithic_and_partitioned_agree_on_constant_load() {
    let pr = problem(32, 32, 33, 1.0, None);
    let dt = 0.01;
    let steps = 50;
    let rhs = load_bundle(&pr, 1.0, steps);
    let x0 = CoupledState::zero(&pr);
    let mono = linear_coupled_solve(&pr, &x0, &rhs, dt).unwrap();
    let part = PartitionedSolver::new(&pr, dt, PartitionedConfig::default()).unwrap();
    let mut states = vec![x0];
    for level in &rhs.levels {
        let (s, rep) = part.step(states.last().unwrap(), level).unwrap();
        assert!(rep.converged, "{:?}", rep.increments);
        states.push(s);
    }
    let part = Trajectory { dt, states };
    let d = max_diff(&mono, &part);
    assert!(d <= 1e-6, "max difference {d:.3e}");
    assert!(mono.last().beam.eta[16] > 1e-4);
}

#[test]
fn monolithic_and_partitioned_agree_in_graph_mode() {
    let profile = BeamProfile::bump(17, 1.0, 0.2).unwrap();
    let pr = problem(16, 16, 17, 1.0, Some(profile));
    let dt = 0.02;
    let mut rhs = load_bundle(&pr, 0.5, 10);
    for level in &mut rhs.levels {
        level.theta_in = vec![0.3; 16];
    }
    let x0 = bump_state(&pr, 0.1);
    let mono = linear_coupled_solve(&pr, &x0, &rhs, dt).unwrap();
    let part = PartitionedSolver::new(&pr, dt, PartitionedConfig::default()).unwrap();
    let mut states = vec![x0];
    for level in &rhs.levels {
        states.push(part.step(states.last().unwrap(), level).unwrap().0);
    }
    let d = max_diff(&mono, &Trajectory { dt, states });
    assert!(d <= 1e-6, "max difference {d:.3e}");
}

#[test]
fn constant_load_approaches_static_deflection() {
    // at rest the side pressure data fix p = 0, so the beam carries the load alone
    let nb = 33;
    let g = FluidGrid::new(16, 16, 1.0).unwrap();
    let beam = BeamParams::new(1.0, 0.0, 0.1, 1.0, nb).unwrap();
    let pr = CoupledProblem::new(&g, &BeamProfile::zero(nb, 1.0).unwrap(), 0.05, beam, SolverOptions::default()).unwrap();
    let c = 0.5;
    let traj = linear_coupled_solve(&pr, &CoupledState::zero(&pr), &load_bundle(&pr, c, 400), 0.5).unwrap();
    let eta = &traj.last().beam.eta;
    let mut worst = 0.0f64;
    let mut peak = 0.0f64;
    for (k, e) in eta.iter().enumerate() {
        let x = beam.x(k);
        let exact = c * x * x * (1.0 - x) * (1.0 - x) / 24.0;
        worst = worst.max((e - exact).abs());
        peak = peak.max(exact);
    }
    assert!(worst <= 0.01 * peak, "{worst:.3e} vs {peak:.3e}");
}

#[test]
fn kinematic_coupling_and_step_residual_hold_every_step() {
    let pr = problem(16, 12, 17, 1.0, Some(BeamProfile::bump(17, 1.0, 0.1).unwrap()));
    let dt = 0.01;
    let rhs = load_bundle(&pr, 2.0, 8);
    let x0 = bump_state(&pr, 0.05);
    let s = LinearCoupledSolver::new(&pr, dt).unwrap();
    let traj = s.solve(&x0, &rhs).unwrap();
    for (n, st) in traj.states.iter().enumerate() {
        let k = kinematic_residual(&pr, st).unwrap();
        assert!(k <= 10.0 * pr.opts.tol, "level {n}: {k:.3e}");
        assert!(pr.ops.max_divergence(&st.fluid.velocity()) <= 1e-9);
        if n > 0 {
            let r = s.step_residual(&traj.states[n - 1], st, &rhs.levels[n - 1]).unwrap();
            assert!(r <= 1e-10, "level {n}: {r:.3e}");
        }
    }
}

#[test]
fn removing_the_added_mass_makes_subiteration_diverge() {
    let length = 4.0;
    let pr = problem(32, 8, 33, length, None);
    let ns = PartitionedSolver::new(&pr, 1e-3, PartitionedConfig::default()).unwrap();
    let top = ns.added_mass().clone().symmetric_eigen().eigenvalues.max();
    assert!(top > 1.0, "largest added-mass eigenvalue {top}");
    let x0 = bump_state(&pr, 0.1);
    let level = RhsLevel::zero(pr.grid(), pr.nodes());
    let run = |added_mass| {
        let cfg = PartitionedConfig {
            added_mass,
            max_sub: 12,
            sub_tol: 1e-13,
        };
        PartitionedSolver::new(&pr, 1e-3, cfg).unwrap().step(&x0, &level).unwrap().1
    };
    let off = run(AddedMass::Off);
    let growth = off.growth_factor().unwrap();
    assert!(growth > 1.0, "{:?}", off.increments);
    let on = run(AddedMass::On);
    assert!(on.converged, "{:?}", on.increments);
}

#[test]
fn collision_guard_cases() {
    let mu = 2.0;
    let ok = BeamState::zero(9);
    assert_eq!(collision_guard(&ok, mu).unwrap(), 1.0);
    let mut pinch = BeamState::zero(9);
    pinch.eta[4] = -1.0 + 1.0 / (4.0 * mu);
    assert!(matches!(collision_guard(&pinch, mu), Err(FsiError::Collision { .. })));
    let mut edge = BeamState::zero(9);
    edge.eta[4] = 1.0 / (2.0 * mu) - 1.0;
    let m = collision_guard(&edge, mu).unwrap();
    assert_eq!(m, 1.0 / (2.0 * mu));
}

#[test]
fn prepare_initial_keeps_compatible_data_and_fixes_the_rest() {
    let pr = problem(16, 16, 17, 1.0, Some(BeamProfile::bump(17, 1.0, 0.2).unwrap()));
    let x = bump_state(&pr, 0.1);
    let again = prepare_initial(&pr, &x.fluid.velocity(), &x.beam).unwrap();
    assert!(again.modification <= 1e-9, "{}", again.modification);
    assert!(kinematic_residual(&pr, &x).unwrap() <= 1e-12);
    assert!(pr.ops.max_divergence(&x.fluid.velocity()) <= 1e-10);

    let mut bad = x.beam.clone();
    bad.eta_t[0] = 0.1;
    assert!(matches!(prepare_initial(&pr, &x.fluid.velocity(), &bad), Err(FsiError::Precondition(_))));
}

fn picard_cfg(horizon: f64, dt: f64) -> PicardConfig {
    PicardConfig {
        horizon,
        dt,
        tol: 1e-9,
        ..Default::default()
    }
}

#[test]
fn picard_with_zero_data_converges_at_once() {
    let pr = problem(12, 12, 13, 1.0, None);
    let out = picard_solve(&pr, &CoupledState::zero(&pr), &NoForcing, &picard_cfg(0.04, 0.01)).unwrap();
    assert_eq!(out.report.status, PicardStatus::Converged);
    assert_eq!(out.report.iterations, 1);
    assert_eq!(out.trajectory.max_abs(), 0.0);
}

#[test]
fn map_ignores_its_argument_without_nonlinear_terms() {
    let pr = problem(12, 12, 13, 1.0, None);
    let x0 = bump_state(&pr, 0.1);
    let map = SlabMap::new(&pr, &NoForcing, 0.0, 0.01, 4, Nonlinearity::Off, 1).unwrap();
    let x = map.initial(&x0).unwrap();
    let mut y = x.clone();
    for s in y.states.iter_mut().skip(1) {
        s.fluid.u1.iter_mut().for_each(|v| *v += 0.3);
        s.beam.eta_t[3] += 0.01;
    }
    let a = map.apply(&x).unwrap();
    let b = map.apply(&y).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, x);
}

#[test]
fn picard_converges_for_moderate_data_and_is_a_fixed_point() {
    let pr = problem(16, 16, 17, 1.0, None);
    let x0 = bump_state(&pr, 0.1);
    let cfg = picard_cfg(0.05, 0.01);
    let out = picard_solve(&pr, &x0, &NoForcing, &cfg).unwrap();
    assert!(out.converged(), "{:?}", out.report);
    assert!(out.report.kappas.iter().all(|k| k.is_finite()));
    assert!(out.report.margins.iter().all(|m| *m > 0.0));
    let map = SlabMap::new(&pr, &NoForcing, 0.0, out.report.dt, out.trajectory.steps(), Nonlinearity::Full, 2).unwrap();
    let again = map.apply(&out.trajectory).unwrap();
    let d = trajectory_norm(pr.grid(), &pr.beam, &again.diff(&out.trajectory).unwrap(), &cfg.weights);
    assert!(d <= 2.0 * cfg.tol * trajectory_norm(pr.grid(), &pr.beam, &out.trajectory, &cfg.weights).max(1.0), "{d:.3e}");
    let r = map.residual(&out.trajectory).unwrap();
    assert!(r <= 10.0 * (cfg.tol + pr.opts.tol), "{r:.3e}");
}

#[test]
fn parallel_and_serial_nonlinear_evaluation_agree() {
    let pr = problem(12, 12, 13, 1.0, None);
    let x0 = bump_state(&pr, 0.1);
    let serial = SlabMap::new(&pr, &NoForcing, 0.0, 0.01, 5, Nonlinearity::Full, 1).unwrap();
    let par = SlabMap::new(&pr, &NoForcing, 0.0, 0.01, 5, Nonlinearity::Full, 3).unwrap();
    let x = serial.initial(&x0).unwrap();
    assert_eq!(serial.nonlinear(&x).unwrap(), par.nonlinear(&x).unwrap());
}

#[test]
fn iteration_cap_halves_down_to_the_floor() {
    let pr = problem(12, 12, 13, 1.0, None);
    let x0 = bump_state(&pr, 0.1);
    let cfg = PicardConfig {
        max_iter: 1,
        t_min: Some(0.02),
        ..picard_cfg(0.08, 0.01)
    };
    let out = picard_solve(&pr, &x0, &NoForcing, &cfg).unwrap();
    assert_eq!(out.report.status, PicardStatus::HalvedToFloor);
    let hs: Vec<f64> = out.report.halvings.iter().map(|h| h.to).collect();
    assert_eq!(hs, vec![0.04, 0.02]);
    assert!(out.report.halvings.iter().all(|h| h.reason == HalvingReason::MaxIter));
}

#[test]
fn graph_mode_requires_reference_equal_to_initial_displacement() {
    let pr = problem(12, 12, 13, 1.0, None);
    let mut x0 = CoupledState::zero(&pr);
    x0.beam.eta = node_samples(13, 1.0, |x| 0.1 * bump_shape(x, 1.0));
    let err = picard_solve(&pr, &x0, &NoForcing, &picard_cfg(0.02, 0.01)).unwrap_err();
    assert!(matches!(err, FsiError::Precondition(_)));
}

#[test]
fn energy_of_zero_is_zero_and_homogeneous_run_dissipates() {
    let pr = problem(16, 16, 17, 1.0, None);
    let zero = Trajectory {
        dt: 0.01,
        states: vec![CoupledState::zero(&pr); 3],
    };
    for e in energy_report(&pr, &zero).unwrap() {
        assert_eq!((e.total, e.dissipation, e.boundary_power), (0.0, 0.0, 0.0));
    }
    let x0 = bump_state(&pr, 0.1);
    let out = picard_solve(&pr, &x0, &NoForcing, &picard_cfg(0.1, 0.01)).unwrap();
    assert!(out.converged());
    let e = energy_report(&pr, &out.trajectory).unwrap();
    assert!(max_energy_increase(&e) <= 1e-8, "{e:?}");
}

#[test]
fn continuation_of_zero_stays_zero() {
    let pr = problem(12, 12, 13, 1.0, None);
    let cont = ContinuationConfig {
        target: 0.06,
        ..Default::default()
    };
    let c = solve_with_continuation(&pr, &CoupledState::zero(&pr), &NoForcing, &picard_cfg(0.02, 0.01), &cont).unwrap();
    assert!(c.completed(0.06));
    assert_eq!(c.slabs.len(), 3);
    assert!(c.slabs.iter().all(|s| s.trajectory.max_abs() == 0.0));
}

#[test]
fn continuation_is_continuous_across_junctions() {
    let pr = problem(16, 16, 17, 1.0, None);
    let x0 = bump_state(&pr, 0.1);
    let cont = ContinuationConfig {
        target: 0.09,
        ..Default::default()
    };
    let c = solve_with_continuation(&pr, &x0, &NoForcing, &picard_cfg(0.03, 0.01), &cont).unwrap();
    assert!(c.completed(0.09), "{:?}", c.status);
    assert_eq!(c.junctions.len(), 2);
    for j in &c.junctions {
        assert!(j.eta <= 1e-10 && j.eta_t <= 1e-10);
        assert!(j.velocity <= 10.0 * pr.opts.tol, "{j:?}");
    }
    for s in &c.slabs[1..] {
        let first = &s.trajectory.states[0];
        assert!(s.problem.ops.max_divergence(&first.fluid.velocity()) <= 1e-10);
    }
}

#[test]
fn remap_preserves_divergence_and_top_trace() {
    let pr = problem(16, 16, 17, 1.0, None);
    let x = bump_state(&pr, 0.1);
    let mut beam = x.beam.clone();
    beam.eta = node_samples(17, 1.0, |s| 0.2 * bump_shape(s, 1.0));
    let next = pr.with_profile(&BeamProfile::from_values(1.0, beam.eta.clone()).unwrap()).unwrap();
    let moved = remap_state(&pr, &next, &CoupledState { fluid: x.fluid.clone(), beam }).unwrap();
    assert!(next.ops.max_divergence(&moved.fluid.velocity()) <= 1e-12);
    assert!(kinematic_residual(&next, &moved).unwrap() <= 1e-12);
}

#[test]
fn config_validation_rejects_bad_values() {
    let mut c = picard_cfg(0.1, 0.03);
    assert!(c.validate().is_err());
    c.dt = 0.01;
    assert!(c.validate().is_ok());
    c.kappa_target = 1.0;
    assert!(c.validate().is_err());
}
