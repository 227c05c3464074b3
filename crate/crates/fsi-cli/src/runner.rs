//! `run` and `restart`: continuation over the configured horizon plus all
//! output files.

use crate::config::{ConfigError, Setup, SolverConfig};
use crate::csvio::{beam_rows, write_field_csv, write_rows, BeamRow};
use crate::report::{EnergySummary, RunReport, RunStatus};
use crate::snapshot::{Snapshot, SnapshotError};
use fsi_core::coupling::{
    energy_report, resume, solve_with_continuation, Continuation, EnergySample, SlabEndpoint,
};
use fsi_core::geometry::BeamProfile;
use fsi_core::FsiError;
use log::{info, warn};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const REPORT: &str = "report.json";
pub const BEAM_CSV: &str = "beam.csv";
pub const ENERGY_CSV: &str = "energy.csv";
pub const FIELD_CSV: &str = "fields_final.csv";
pub const CONFIG_ECHO: &str = "config.effective.toml";

/// Failure before the solver starts.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("snapshot {path}: {source}")]
    Snapshot { path: PathBuf, source: SnapshotError },
    #[error("snapshot {path} does not match the config: {what}")]
    Mismatch { path: PathBuf, what: String },
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
}

pub fn snapshot_name(k: usize) -> String {
    format!("snap_{k:04}.fsib")
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    fs::write(path, bytes).map_err(|source| RunError::Output {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs a validated config from its initial data. Solver failures end up in
/// the report; only config and output problems are errors.
pub fn execute(cfg: &SolverConfig, base: &Path, out: &Path, workers: usize) -> Result<RunReport, RunError> {
    let setup = Setup::build(cfg, base)?;
    let effective = cfg.effective(base)?;
    prepare_dir(out, &effective)?;
    let mut pc = cfg.picard_config(workers);
    pc.mu = Some(setup.mu);
    let t0 = Instant::now();
    info!("run: target {}, horizon {}, dt {}", cfg.run.target, pc.horizon, pc.dt);
    let result = solve_with_continuation(&setup.problem, &setup.x0, &setup.forcing, &pc, &cfg.continuation());
    finish(cfg, &effective, out, setup.modification, setup.mu, None, result, t0)
}

/// Restart from a slab-end snapshot. The reference, horizon and step come
/// from the snapshot; everything else from `cfg`.
pub fn restart(
    cfg: &SolverConfig,
    base: &Path,
    snapshot: &Path,
    out: &Path,
    workers: usize,
) -> Result<RunReport, RunError> {
    let setup = Setup::build(cfg, base)?;
    let bytes = fs::read(snapshot).map_err(|e| RunError::Snapshot {
        path: snapshot.to_path_buf(),
        source: SnapshotError::Header(e.to_string()),
    })?;
    let snap = Snapshot::from_bytes(&bytes).map_err(|source| RunError::Snapshot {
        path: snapshot.to_path_buf(),
        source,
    })?;
    let mismatch = |what: String| RunError::Mismatch {
        path: snapshot.to_path_buf(),
        what,
    };
    let g = setup.problem.grid();
    if (snap.nx, snap.nz) != (g.nx, g.nz) {
        return Err(mismatch(format!("grid {} x {} vs {} x {}", snap.nx, snap.nz, g.nx, g.nz)));
    }
    let Some(block) = snap.beam.as_ref() else {
        return Err(mismatch("no beam block; not a slab-end snapshot".into()));
    };
    if block.eta.len() != setup.problem.nodes() {
        return Err(mismatch(format!("{} beam nodes vs {}", block.eta.len(), setup.problem.nodes())));
    }
    if block.length != cfg.physics.length {
        return Err(mismatch(format!("length {} vs {}", block.length, cfg.physics.length)));
    }
    if !(block.horizon > 0.0 && block.dt > 0.0 && block.dt <= block.horizon) {
        return Err(mismatch(format!("horizon {} with step {}", block.horizon, block.dt)));
    }
    let profile = BeamProfile::from_values(block.length, block.eta0.clone())
        .map_err(|e| mismatch(format!("reference profile: {e}")))?;
    let problem = setup
        .problem
        .with_profile(&profile)
        .map_err(|e| mismatch(format!("reference profile: {e}")))?;
    let state = snap.coupled_state().expect("beam block present");
    state.check(&problem).map_err(|e| mismatch(e.to_string()))?;
    let effective = cfg.effective(base)?;
    prepare_dir(out, &effective)?;
    let mut pc = cfg.picard_config(workers);
    pc.mu = Some(setup.mu);
    let from = SlabEndpoint {
        problem,
        state,
        horizon: block.horizon,
        dt: block.dt,
    };
    info!("restart from t = {}", snap.t);
    let t0 = Instant::now();
    let result = resume(from, &setup.forcing, &pc, &cfg.continuation());
    finish(cfg, &effective, out, 0.0, setup.mu, Some(snap.t), result, t0)
}

fn prepare_dir(out: &Path, effective: &SolverConfig) -> Result<(), RunError> {
    fs::create_dir_all(out).map_err(|source| RunError::Output {
        path: out.to_path_buf(),
        source,
    })?;
    write(&out.join(CONFIG_ECHO), effective.to_toml().as_bytes())
}

#[allow(clippy::too_many_arguments)]
fn finish(
    cfg: &SolverConfig,
    effective: &SolverConfig,
    out: &Path,
    modification: f64,
    mu: f64,
    restart_from: Option<f64>,
    result: fsi_core::Result<Continuation>,
    t0: Instant,
) -> Result<RunReport, RunError> {
    let target = cfg.run.target;
    let mut report = RunReport {
        status: RunStatus::SolverFailure,
        exit_code: RunStatus::SolverFailure.exit_code(),
        target,
        end_time: restart_from.unwrap_or(0.0),
        error: None,
        initial_modification: modification,
        mu,
        restart_from,
        slabs: Vec::new(),
        junctions: Vec::new(),
        energy: None,
        snapshots: Vec::new(),
        config: effective.clone(),
        seconds: 0.0,
    };
    match result {
        Err(e) => {
            warn!("run failed: {e}");
            report.status = match e {
                FsiError::Collision { .. } => RunStatus::Collision,
                FsiError::HorizonFloor { .. } => RunStatus::HorizonFloor,
                _ => RunStatus::SolverFailure,
            };
            report.error = Some(e.to_string());
        }
        Ok(c) => {
            report.status = RunStatus::of(&c, target);
            let done = c.slabs.iter().rev().find(|s| s.report.status == fsi_core::coupling::PicardStatus::Converged);
            if let Some(s) = done {
                report.end_time = s.trajectory.last().t();
            }
            report.slabs = RunReport::slabs_of(&c);
            report.junctions = c.junctions.clone();
            write_outputs(cfg, out, &c, restart_from.is_some(), &mut report)?;
        }
    }
    report.exit_code = report.status.exit_code();
    report.seconds = t0.elapsed().as_secs_f64();
    write(&out.join(REPORT), report.to_json().as_bytes())?;
    info!("status {:?} at t = {:.6}", report.status, report.end_time);
    Ok(report)
}

fn write_outputs(
    cfg: &SolverConfig,
    out: &Path,
    c: &Continuation,
    restarted: bool,
    report: &mut RunReport,
) -> Result<(), RunError> {
    let converged = |k: usize| c.slabs[k].report.status == fsi_core::coupling::PicardStatus::Converged;
    let every = cfg.output.snapshot_every;
    let last_ok = (0..c.slabs.len()).rev().find(|&k| converged(k));
    for (k, s) in c.slabs.iter().enumerate() {
        if !converged(k) {
            continue;
        }
        let due = (every > 0 && (k + 1) % every == 0) || Some(k) == last_ok;
        if !due {
            continue;
        }
        let e = SlabEndpoint {
            problem: s.problem.clone(),
            state: s.trajectory.last().clone(),
            horizon: s.report.horizon,
            dt: s.report.dt,
        };
        let name = snapshot_name(k + 1);
        write(&out.join(&name), &Snapshot::from_endpoint(&e).to_bytes())?;
        report.snapshots.push(name);
    }
    let mut beam: Vec<BeamRow> = Vec::new();
    let mut energy: Vec<EnergySample> = Vec::new();
    for (k, s) in c.slabs.iter().enumerate() {
        if !converged(k) {
            continue;
        }
        // the first level of every later slab repeats the previous end
        let skip = k > 0 || restarted;
        beam.extend(beam_rows(&s.trajectory, cfg.physics.length, skip));
        match energy_report(&s.problem, &s.trajectory) {
            Ok(e) => energy.extend(e.into_iter().skip(usize::from(skip))),
            Err(e) => warn!("energy of slab {k}: {e}"),
        }
    }
    report.energy = EnergySummary::of(&energy);
    let csv_file = |name: &str| -> Result<fs::File, RunError> {
        let path = out.join(name);
        fs::File::create(&path).map_err(|source| RunError::Output { path, source })
    };
    let csv_err = |name: &str, e: String| RunError::Output {
        path: out.join(name),
        source: std::io::Error::other(e),
    };
    if cfg.output.beam_csv {
        write_rows(&beam, csv_file(BEAM_CSV)?).map_err(|e| csv_err(BEAM_CSV, e))?;
    }
    if cfg.output.energy_csv {
        write_rows(&energy, csv_file(ENERGY_CSV)?).map_err(|e| csv_err(ENERGY_CSV, e))?;
    }
    if cfg.output.field_csv {
        if let Some(s) = c.slabs.last() {
            let g = s.problem.grid();
            if g.nx <= 64 && g.nz <= 64 {
                write_field_csv(g, &s.trajectory.last().fluid, csv_file(FIELD_CSV)?).map_err(|e| csv_err(FIELD_CSV, e))?;
            } else {
                warn!("field CSV skipped for a {} x {} grid", g.nx, g.nz);
            }
        }
    }
    Ok(())
}
