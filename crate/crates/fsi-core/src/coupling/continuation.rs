//! Slab-by-slab continuation with the reference rebuilt from the final
//! displacement of each slab.
//!
//! At the end of a slab the flattened coordinate of the old reference and of
//! the new one (the current configuration) coincide, so the velocity is
//! carried over through its flattened flux: `u_new = Piola_new(Pinv_old u)`.
//! This keeps the divergence exactly and the top trace unchanged.

use super::picard::{picard_solve, FixedPointReport, Forcing, PicardConfig, PicardStatus};
use super::problem::{collision_guard, prepare_initial, CoupledProblem, CoupledState, Trajectory};
use crate::error::{FsiError, Result};
use crate::geometry::BeamProfile;
use crate::stokes::FluidState;
use log::info;
use serde::{Deserialize, Serialize};

/// One completed (or failed) slab.
#[derive(Debug, Clone)]
pub struct Slab {
    pub problem: CoupledProblem,
    pub trajectory: Trajectory,
    pub report: FixedPointReport,
}

/// Jumps at the start of a slab relative to the end of the previous one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Junction {
    pub t: f64,
    pub eta: f64,
    pub eta_t: f64,
    /// Change of the mapped velocity by the compatibility projection.
    pub velocity: f64,
}

#[derive(Debug, Clone)]
pub struct Continuation {
    pub slabs: Vec<Slab>,
    pub junctions: Vec<Junction>,
    pub status: PicardStatus,
}

impl Continuation {
    pub fn end_time(&self) -> f64 {
        self.slabs.last().map_or(0.0, |s| s.trajectory.last().t())
    }

    pub fn completed(&self, target: f64) -> bool {
        self.status == PicardStatus::Converged && self.end_time() >= target * (1.0 - 1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationConfig {
    /// End time of the continued run.
    pub target: f64,
    /// Rebuild the reference from the final displacement of every slab.
    pub rebuild_reference: bool,
    pub max_slabs: usize,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self {
            target: 1.0,
            rebuild_reference: true,
            max_slabs: 1000,
        }
    }
}

/// Moves a state to the problem built on the reference `next`.
pub fn remap_state(old: &CoupledProblem, next: &CoupledProblem, state: &CoupledState) -> Result<CoupledState> {
    let g = old.grid();
    if g != next.grid() {
        return Err(FsiError::Precondition("remap needs identical grids".into()));
    }
    let flux = old.ops.pinv.matvec(&state.fluid.velocity());
    let u = next.ops.piola.matvec(&flux);
    Ok(CoupledState {
        fluid: FluidState::from_velocity(g, &u, state.fluid.p.clone(), state.fluid.t)?,
        beam: state.beam.clone(),
    })
}

/// Continues `first` (a converged slab) up to `cont.target`. Each new slab
/// starts with the horizon of the last successful one.
pub fn continue_solution(
    first: Slab,
    forcing: &dyn Forcing,
    cfg: &PicardConfig,
    cont: &ContinuationConfig,
) -> Result<Continuation> {
    if first.report.status != PicardStatus::Converged {
        return Err(FsiError::Precondition("continuation needs a converged first slab".into()));
    }
    let mut out = Continuation {
        slabs: vec![first],
        junctions: Vec::new(),
        status: PicardStatus::Converged,
    };
    extend(&mut out, None, forcing, cfg, cont)?;
    Ok(out)
}

/// End of a converged slab, enough to start the next one.
#[derive(Debug, Clone)]
pub struct SlabEndpoint {
    pub problem: CoupledProblem,
    pub state: CoupledState,
    pub horizon: f64,
    pub dt: f64,
}

/// Continues from a stored slab end (restart). The returned slabs start after
/// `from`.
pub fn resume(
    from: SlabEndpoint,
    forcing: &dyn Forcing,
    cfg: &PicardConfig,
    cont: &ContinuationConfig,
) -> Result<Continuation> {
    let mut out = Continuation {
        slabs: Vec::new(),
        junctions: Vec::new(),
        status: PicardStatus::Converged,
    };
    extend(&mut out, Some(from), forcing, cfg, cont)?;
    Ok(out)
}

fn extend(
    out: &mut Continuation,
    mut start: Option<SlabEndpoint>,
    forcing: &dyn Forcing,
    cfg: &PicardConfig,
    cont: &ContinuationConfig,
) -> Result<()> {
    while out.slabs.len() < cont.max_slabs {
        let last = match start.take() {
            Some(e) => e,
            None => {
                let s = out.slabs.last().expect("nonempty");
                SlabEndpoint {
                    problem: s.problem.clone(),
                    state: s.trajectory.last().clone(),
                    horizon: s.report.horizon,
                    dt: s.report.dt,
                }
            }
        };
        let end = last.state;
        let t = end.t();
        if t >= cont.target * (1.0 - 1e-12) {
            break;
        }
        let next = if cont.rebuild_reference {
            let profile = BeamProfile::from_values(last.problem.profile.length, end.beam.eta.clone())?;
            last.problem.with_profile(&profile)?
        } else {
            last.problem.clone()
        };
        let mapped = remap_state(&last.problem, &next, &end)?;
        let prepared = prepare_initial(&next, &mapped.fluid.velocity(), &mapped.beam)?;
        let mut x0 = prepared.state;
        x0.fluid.p = mapped.fluid.p.clone();
        x0.fluid.t = t;
        out.junctions.push(Junction {
            t,
            eta: max_diff(&x0.beam.eta, &end.beam.eta),
            eta_t: max_diff(&x0.beam.eta_t, &end.beam.eta_t),
            velocity: prepared.modification,
        });
        let remaining = cont.target - t;
        let mut slab_cfg = cfg.clone();
        let h = last.horizon.min(remaining);
        let dt = last.dt.min(h);
        let steps = (h / dt).round().max(1.0);
        slab_cfg.dt = h / steps;
        slab_cfg.horizon = h;
        slab_cfg.t_min = Some(cfg.t_min().min(0.5 * h));
        slab_cfg.allow_reference_offset = cfg.allow_reference_offset || !cont.rebuild_reference;
        let mu = cfg.mu.unwrap_or_else(|| next.profile.inverse_gap());
        if let Err(e) = collision_guard(&x0.beam, mu) {
            info!("stopping at t = {t:.4e}: {e}");
            out.status = PicardStatus::Collision;
            break;
        }
        info!("continuing from t = {t:.4e} with horizon {h:.4e}");
        let outcome = picard_solve(&next, &x0, forcing, &slab_cfg)?;
        let status = outcome.report.status;
        out.slabs.push(Slab {
            problem: next,
            trajectory: outcome.trajectory,
            report: outcome.report,
        });
        if status != PicardStatus::Converged {
            out.status = status;
            break;
        }
    }
    Ok(())
}

/// First slab plus continuation in one call.
pub fn solve_with_continuation(
    problem: &CoupledProblem,
    x0: &CoupledState,
    forcing: &dyn Forcing,
    cfg: &PicardConfig,
    cont: &ContinuationConfig,
) -> Result<Continuation> {
    let outcome = picard_solve(problem, x0, forcing, cfg)?;
    let first = Slab {
        problem: problem.clone(),
        trajectory: outcome.trajectory,
        report: outcome.report,
    };
    if first.report.status != PicardStatus::Converged {
        let status = first.report.status;
        return Ok(Continuation {
            slabs: vec![first],
            junctions: Vec::new(),
            status,
        });
    }
    continue_solution(first, forcing, cfg, cont)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}
