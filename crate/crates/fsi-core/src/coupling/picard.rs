//! Fixed-point iteration over whole time slabs with horizon halving.

use super::monolithic::LinearCoupledSolver;
use super::norms::{trajectory_norm, NormWeights};
use super::problem::{collision_guard, CoupledProblem, CoupledState, Trajectory};
use crate::error::{FsiError, Result};
use crate::geometry::GeometryMap;
use crate::nonlinear::{Level, NonlinearEvaluator, RhsBundle, RhsLevel};
use log::{debug, info};
use serde::{Deserialize, Serialize};

/// External data `(f, Theta, h)` as a function of time.
pub trait Forcing: Sync {
    fn level(&self, problem: &CoupledProblem, t: f64) -> Result<RhsLevel>;
}

/// Homogeneous forcing.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoForcing;

impl Forcing for NoForcing {
    fn level(&self, problem: &CoupledProblem, _t: f64) -> Result<RhsLevel> {
        Ok(RhsLevel::zero(problem.grid(), problem.nodes()))
    }
}

impl<F> Forcing for F
where
    F: Fn(&CoupledProblem, f64) -> Result<RhsLevel> + Sync,
{
    fn level(&self, problem: &CoupledProblem, t: f64) -> Result<RhsLevel> {
        self(problem, t)
    }
}

/// Levels `t0 + n dt`, `n = 1..=steps`.
pub fn forcing_bundle(problem: &CoupledProblem, forcing: &dyn Forcing, t0: f64, dt: f64, steps: usize) -> Result<RhsBundle> {
    let levels = (1..=steps)
        .map(|n| forcing.level(problem, t0 + n as f64 * dt))
        .collect::<Result<Vec<_>>>()?;
    Ok(RhsBundle { levels })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    #[default]
    Full,
    /// Nonlinear right-hand sides replaced by zero.
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig {
    pub horizon: f64,
    pub dt: f64,
    /// Defaults to `horizon / 64`.
    pub t_min: Option<f64>,
    /// Ball radius; defaults to twice the norm of the first iterate.
    pub radius: Option<f64>,
    /// Gap parameter; defaults to `max 1 / (1 + eta0)`.
    pub mu: Option<f64>,
    pub kappa_target: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub weights: NormWeights,
    /// Accept initial displacement different from the reference profile.
    pub allow_reference_offset: bool,
    pub nonlinearity: Nonlinearity,
    pub workers: usize,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            horizon: 0.1,
            dt: 0.01,
            t_min: None,
            radius: None,
            mu: None,
            kappa_target: 0.5,
            max_iter: 40,
            tol: 1e-8,
            weights: NormWeights::default(),
            allow_reference_offset: false,
            nonlinearity: Nonlinearity::Full,
            workers: 1,
        }
    }
}

impl PicardConfig {
    pub fn t_min(&self) -> f64 {
        self.t_min.unwrap_or(self.horizon / 64.0)
    }

    pub fn steps(&self) -> Result<usize> {
        let r = self.horizon / self.dt;
        let n = r.round();
        if !(n >= 1.0) || (r - n).abs() > 1e-9 * r.max(1.0) {
            return Err(FsiError::Config(format!(
                "dt = {} does not divide the horizon {}",
                self.dt, self.horizon
            )));
        }
        Ok(n as usize)
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            errs.push(format!("horizon must be > 0, got {}", self.horizon));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            errs.push(format!("dt must be > 0, got {}", self.dt));
        }
        if !(self.kappa_target > 0.0 && self.kappa_target < 1.0) {
            errs.push(format!("kappa_target must lie in (0, 1), got {}", self.kappa_target));
        }
        if !(self.t_min() > 0.0 && self.t_min() < self.horizon) {
            errs.push(format!("t_min must lie in (0, horizon), got {}", self.t_min()));
        }
        if !(self.tol > 0.0) {
            errs.push(format!("tol must be > 0, got {}", self.tol));
        }
        if self.max_iter == 0 {
            errs.push("max_iter must be >= 1".into());
        }
        if let Some(r) = self.radius {
            if !(r > 0.0) {
                errs.push(format!("radius must be > 0, got {r}"));
            }
        }
        if let Some(m) = self.mu {
            if !(m > 0.0) {
                errs.push(format!("mu must be > 0, got {m}"));
            }
        }
        if errs.is_empty() {
            self.steps().map(|_| ())
        } else {
            Err(FsiError::Config(errs.join("; ")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PicardStatus {
    Converged,
    HalvedToFloor,
    Collision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HalvingReason {
    Contraction { kappa: f64 },
    Ball { norm: f64, radius: f64 },
    Collision { margin: f64, threshold: f64 },
    MaxIter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalvingEvent {
    pub from: f64,
    pub to: f64,
    pub iteration: usize,
    pub reason: HalvingReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttemptSummary {
    pub horizon: f64,
    pub dt: f64,
    pub iterations: usize,
    pub residuals: Vec<f64>,
    pub kappas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    /// Iterations of the final attempt.
    pub iterations: usize,
    /// `||X_{k+1} - X_k||` of the final attempt.
    pub residuals: Vec<f64>,
    pub kappas: Vec<f64>,
    pub halvings: Vec<HalvingEvent>,
    /// `min (1 + eta)` over each iterate of the final attempt.
    pub margins: Vec<f64>,
    pub status: PicardStatus,
    pub horizon: f64,
    pub dt: f64,
    pub radius: f64,
    pub mu: f64,
    pub attempts: Vec<AttemptSummary>,
}

#[derive(Debug, Clone)]
pub struct PicardOutcome {
    /// Converged slab, or the last iterate of the last attempt.
    pub trajectory: Trajectory,
    pub report: FixedPointReport,
}

impl PicardOutcome {
    pub fn converged(&self) -> bool {
        self.report.status == PicardStatus::Converged
    }
}

/// Fixed data of one slab: linear solver, nonlinear evaluator, forcing.
pub struct SlabMap {
    pub solver: LinearCoupledSolver,
    pub evaluator: NonlinearEvaluator,
    pub forcing: RhsBundle,
    pub nonlinearity: Nonlinearity,
    pub workers: usize,
}

impl SlabMap {
    pub fn new(
        problem: &CoupledProblem,
        forcing: &dyn Forcing,
        t0: f64,
        dt: f64,
        steps: usize,
        nonlinearity: Nonlinearity,
        workers: usize,
    ) -> Result<Self> {
        Ok(Self {
            solver: LinearCoupledSolver::new(problem, dt)?,
            evaluator: NonlinearEvaluator::new(&problem.ops, problem.nodes(), problem.nu)?,
            forcing: forcing_bundle(problem, forcing, t0, dt, steps)?,
            nonlinearity,
            workers: workers.max(1),
        })
    }

    pub fn problem(&self) -> &CoupledProblem {
        &self.solver.problem
    }

    pub fn steps(&self) -> usize {
        self.forcing.steps()
    }

    /// Nonlinear right-hand sides along `x`.
    pub fn nonlinear(&self, x: &Trajectory) -> Result<RhsBundle> {
        let pr = self.problem();
        let steps = self.steps();
        if x.steps() != steps {
            return Err(FsiError::Dimension {
                what: "trajectory levels",
                expected: steps + 1,
                got: x.states.len(),
            });
        }
        if self.nonlinearity == Nonlinearity::Off {
            return Ok(RhsBundle::zero(pr.grid(), pr.nodes(), steps));
        }
        let geo = x
            .states
            .iter()
            .map(|s| pr.geometry(&s.beam))
            .collect::<Result<Vec<GeometryMap>>>()?;
        let vel: Vec<Vec<f64>> = x.states.iter().map(|s| s.fluid.velocity()).collect();
        let eval = |n: usize| -> Result<RhsLevel> {
            self.evaluator.level(
                Level { gm: &geo[n], u: &vel[n] },
                Level { gm: &geo[n - 1], u: &vel[n - 1] },
                &x.states[n].fluid.p,
                x.dt,
            )
        };
        let levels: Vec<Result<RhsLevel>> = if self.workers <= 1 || steps < 2 {
            (1..=steps).map(eval).collect()
        } else {
            let chunk = steps.div_ceil(self.workers);
            let eval = &eval;
            std::thread::scope(|s| {
                let handles: Vec<_> = (0..self.workers)
                    .map(|w| {
                        let lo = 1 + w * chunk;
                        let hi = (lo + chunk).min(steps + 1);
                        s.spawn(move || (lo..hi).map(eval).collect::<Vec<_>>())
                    })
                    .collect();
                handles
                    .into_iter()
                    .flat_map(|h| h.join().expect("nonlinear worker panicked"))
                    .collect()
            })
        };
        Ok(RhsBundle {
            levels: levels.into_iter().collect::<Result<Vec<_>>>()?,
        })
    }

    /// Full right-hand side (forcing plus nonlinear terms) along `x`.
    pub fn rhs(&self, x: &Trajectory) -> Result<RhsBundle> {
        self.forcing.plus(&self.nonlinear(x)?)
    }

    /// Linear solve from `x0` with forcing only.
    pub fn initial(&self, x0: &CoupledState) -> Result<Trajectory> {
        self.solver.solve(x0, &self.forcing)
    }

    /// The fixed-point map: linear solve from `x.states[0]` with the right-hand
    /// side evaluated along `x`.
    pub fn apply(&self, x: &Trajectory) -> Result<Trajectory> {
        self.solver.solve(&x.states[0], &self.rhs(x)?)
    }

    /// Largest row-scaled residual of the step equations along `x` with the
    /// right-hand side evaluated on `x` itself.
    pub fn residual(&self, x: &Trajectory) -> Result<f64> {
        let rhs = self.rhs(x)?;
        let mut worst = 0.0f64;
        for (n, level) in rhs.levels.iter().enumerate() {
            worst = worst.max(self.solver.step_residual(&x.states[n], &x.states[n + 1], level)?);
        }
        Ok(worst)
    }
}

/// `X -> F(X)` for a slab with uniform step `x.dt`.
pub fn picard_map(
    problem: &CoupledProblem,
    x: &Trajectory,
    forcing: &dyn Forcing,
    nonlinearity: Nonlinearity,
) -> Result<Trajectory> {
    let t0 = x.states[0].t();
    SlabMap::new(problem, forcing, t0, x.dt, x.steps(), nonlinearity, 1)?.apply(x)
}

/// Checks the ball constraint `||x|| <= radius` and the gap `min (1 + eta) >= 1 / (2 mu)`.
pub fn check_ball(problem: &CoupledProblem, x: &Trajectory, radius: f64, mu: f64, w: &NormWeights) -> Result<()> {
    for s in &x.states {
        collision_guard(&s.beam, mu)?;
    }
    let norm = trajectory_norm(problem.grid(), &problem.beam, x, w);
    if norm > radius {
        return Err(FsiError::Ball(format!("norm {norm:.6e} exceeds radius {radius:.6e}")));
    }
    Ok(())
}

enum SlabEnd {
    Converged,
    Halve(HalvingReason),
}

struct SlabRun {
    traj: Trajectory,
    residuals: Vec<f64>,
    kappas: Vec<f64>,
    margins: Vec<f64>,
    end: SlabEnd,
    radius: f64,
}

/// Iteration controls for one slab.
#[derive(Clone, Copy)]
struct SlabControl {
    radius: Option<f64>,
    mu: f64,
    tol: f64,
    max_iter: usize,
    kappa_target: Option<f64>,
}

fn run_slab(map: &SlabMap, x0: &CoupledState, ctl: SlabControl, w: &NormWeights) -> Result<SlabRun> {
    let pr = map.problem();
    let norm = |x: &Trajectory| trajectory_norm(pr.grid(), &pr.beam, x, w);
    let mut x = map.initial(x0)?;
    let radius = ctl.radius.unwrap_or_else(|| (2.0 * norm(&x)).max(1e-12));
    let threshold = 1.0 / (2.0 * ctl.mu);
    let mut run = SlabRun {
        traj: x.clone(),
        residuals: Vec::new(),
        kappas: Vec::new(),
        margins: vec![x.min_gap()],
        end: SlabEnd::Halve(HalvingReason::MaxIter),
        radius,
    };
    for k in 0..ctl.max_iter {
        let margin = x.min_gap();
        if margin < threshold {
            run.end = SlabEnd::Halve(HalvingReason::Collision { margin, threshold });
            return Ok(run);
        }
        let nx = map.apply(&x)?;
        let d = norm(&nx.diff(&x)?);
        let size = norm(&nx);
        run.margins.push(nx.min_gap());
        if let Some(&prev) = run.residuals.last() {
            let kappa = if prev > 0.0 { d / prev } else { 0.0 };
            run.kappas.push(kappa);
        }
        run.residuals.push(d);
        debug!("picard iter {k}: residual {d:.3e}, norm {size:.3e}");
        run.traj = nx.clone();
        if !d.is_finite() {
            run.end = SlabEnd::Halve(HalvingReason::Contraction { kappa: f64::INFINITY });
            return Ok(run);
        }
        if d <= ctl.tol * size.max(1.0) {
            run.end = SlabEnd::Converged;
            return Ok(run);
        }
        if size > radius {
            run.end = SlabEnd::Halve(HalvingReason::Ball { norm: size, radius });
            return Ok(run);
        }
        if let (Some(target), Some(&kappa)) = (ctl.kappa_target, run.kappas.last()) {
            if kappa > target {
                run.end = SlabEnd::Halve(HalvingReason::Contraction { kappa });
                return Ok(run);
            }
        }
        x = nx;
    }
    Ok(run)
}

fn default_mu(problem: &CoupledProblem) -> f64 {
    problem.profile.inverse_gap()
}

fn check_initial(problem: &CoupledProblem, x0: &CoupledState, cfg: &PicardConfig, mu: f64) -> Result<()> {
    x0.check(problem)?;
    if !cfg.allow_reference_offset {
        let off = x0
            .beam
            .eta
            .iter()
            .zip(&problem.profile.eta0)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if off > 1e-12 {
            return Err(FsiError::Precondition(format!(
                "initial displacement differs from the reference profile by {off:.3e}; \
                 the reference must equal the initial configuration unless the offset is allowed"
            )));
        }
    }
    collision_guard(&x0.beam, mu).map_err(|e| FsiError::Precondition(format!("initial state: {e}")))?;
    Ok(())
}

/// Solves the nonlinear slab problem from `x0`, halving the horizon when the
/// iteration fails to contract, leaves the ball or approaches collision.
pub fn picard_solve(
    problem: &CoupledProblem,
    x0: &CoupledState,
    forcing: &dyn Forcing,
    cfg: &PicardConfig,
) -> Result<PicardOutcome> {
    cfg.validate()?;
    let mu = cfg.mu.unwrap_or_else(|| default_mu(problem));
    check_initial(problem, x0, cfg, mu)?;
    let t_min = cfg.t_min();
    let mut dt = cfg.dt;
    let mut steps = cfg.steps()?;
    let mut halvings = Vec::new();
    let mut attempts = Vec::new();
    loop {
        let horizon = dt * steps as f64;
        let map = SlabMap::new(problem, forcing, x0.t(), dt, steps, cfg.nonlinearity, cfg.workers)?;
        let ctl = SlabControl {
            radius: cfg.radius,
            mu,
            tol: cfg.tol,
            max_iter: cfg.max_iter,
            kappa_target: Some(cfg.kappa_target),
        };
        let run = run_slab(&map, x0, ctl, &cfg.weights)?;
        attempts.push(AttemptSummary {
            horizon,
            dt,
            iterations: run.residuals.len(),
            residuals: run.residuals.clone(),
            kappas: run.kappas.clone(),
        });
        let mut report = FixedPointReport {
            iterations: run.residuals.len(),
            residuals: run.residuals,
            kappas: run.kappas,
            halvings: halvings.clone(),
            margins: run.margins,
            status: PicardStatus::Converged,
            horizon,
            dt,
            radius: run.radius,
            mu,
            attempts: attempts.clone(),
        };
        let reason = match run.end {
            SlabEnd::Converged => {
                info!("picard converged on [{}, {}] in {} iterations", x0.t(), x0.t() + horizon, report.iterations);
                return Ok(PicardOutcome {
                    trajectory: run.traj,
                    report,
                });
            }
            SlabEnd::Halve(r) => r,
        };
        let to = 0.5 * horizon;
        if to < t_min * (1.0 - 1e-12) {
            report.status = match reason {
                HalvingReason::Collision { .. } => PicardStatus::Collision,
                _ => PicardStatus::HalvedToFloor,
            };
            info!("picard stopped at the horizon floor ({reason:?})");
            return Ok(PicardOutcome {
                trajectory: run.traj,
                report,
            });
        }
        info!("halving horizon {horizon:.4e} -> {to:.4e} ({reason:?})");
        halvings.push(HalvingEvent {
            from: horizon,
            to,
            iteration: report.iterations,
            reason,
        });
        if steps % 2 == 0 {
            steps /= 2;
        } else {
            dt *= 0.5;
        }
    }
}

/// Contraction behaviour at one fixed horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionSample {
    pub horizon: f64,
    pub dt: f64,
    pub residuals: Vec<f64>,
    pub kappas: Vec<f64>,
    /// Ratio of the last two residuals above the noise floor.
    pub kappa: f64,
    pub converged: bool,
}

/// Runs the iteration at horizons `T, T/2, ...` (`count` values, steps halved
/// at fixed `dt` while possible) without adaptive halving.
pub fn contraction_study(
    problem: &CoupledProblem,
    x0: &CoupledState,
    forcing: &dyn Forcing,
    cfg: &PicardConfig,
    count: usize,
) -> Result<Vec<ContractionSample>> {
    cfg.validate()?;
    let mu = cfg.mu.unwrap_or_else(|| default_mu(problem));
    check_initial(problem, x0, cfg, mu)?;
    let mut dt = cfg.dt;
    let mut steps = cfg.steps()?;
    let mut out = Vec::new();
    for _ in 0..count {
        let map = SlabMap::new(problem, forcing, x0.t(), dt, steps, cfg.nonlinearity, cfg.workers)?;
        let ctl = SlabControl {
            radius: Some(f64::INFINITY),
            mu,
            tol: cfg.tol,
            max_iter: cfg.max_iter,
            kappa_target: None,
        };
        let run = run_slab(&map, x0, ctl, &cfg.weights)?;
        let size = run.traj.max_abs().max(1.0);
        let floor = 1e3 * problem.opts.tol * size;
        let mut kappa = 0.0;
        for (k, w) in run.residuals.windows(2).enumerate() {
            if w[1] > floor && w[0] > 0.0 {
                kappa = run.kappas[k];
            }
        }
        out.push(ContractionSample {
            horizon: dt * steps as f64,
            dt,
            converged: matches!(run.end, SlabEnd::Converged),
            residuals: run.residuals,
            kappas: run.kappas,
            kappa,
        });
        if steps % 2 == 0 {
            steps /= 2;
        } else {
            dt *= 0.5;
        }
    }
    Ok(out)
}
