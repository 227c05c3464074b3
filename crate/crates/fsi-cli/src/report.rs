//! JSON run report.

use crate::config::SolverConfig;
use fsi_core::coupling::{Continuation, EnergySample, FixedPointReport, Junction, PicardStatus};
use serde::{Deserialize, Serialize};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const COLLISION: i32 = 2;
    pub const HORIZON_FLOOR: i32 = 3;
    pub const SOLVER: i32 = 4;
    pub const CONFIG: i32 = 5;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Collision,
    HorizonFloor,
    /// `run.max_slabs` reached before the target time.
    SlabLimit,
    SolverFailure,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Completed => exit::SUCCESS,
            RunStatus::Collision => exit::COLLISION,
            RunStatus::HorizonFloor | RunStatus::SlabLimit => exit::HORIZON_FLOOR,
            RunStatus::SolverFailure => exit::SOLVER,
        }
    }

    pub fn of(c: &Continuation, target: f64) -> Self {
        match c.status {
            PicardStatus::Collision => RunStatus::Collision,
            PicardStatus::HalvedToFloor => RunStatus::HorizonFloor,
            PicardStatus::Converged if c.completed(target) => RunStatus::Completed,
            PicardStatus::Converged => RunStatus::SlabLimit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlabReport {
    pub t0: f64,
    pub t1: f64,
    /// Largest `|eta0|` of the reference the slab was solved on.
    pub reference_amplitude: f64,
    pub fixed_point: FixedPointReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySummary {
    pub initial: f64,
    pub last: f64,
    /// Largest increase of the total energy over one step.
    pub max_increase: f64,
}

impl EnergySummary {
    pub fn of(samples: &[EnergySample]) -> Option<Self> {
        Some(Self {
            initial: samples.first()?.total,
            last: samples.last()?.total,
            max_increase: fsi_core::coupling::max_energy_increase(samples),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub status: RunStatus,
    pub exit_code: i32,
    pub target: f64,
    pub end_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Size of the compatibility correction of the initial velocity.
    pub initial_modification: f64,
    pub mu: f64,
    /// Time of the snapshot a restart started from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restart_from: Option<f64>,
    pub slabs: Vec<SlabReport>,
    pub junctions: Vec<Junction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergySummary>,
    pub snapshots: Vec<String>,
    pub config: SolverConfig,
    pub seconds: f64,
}

impl RunReport {
    pub fn slabs_of(c: &Continuation) -> Vec<SlabReport> {
        c.slabs
            .iter()
            .map(|s| SlabReport {
                t0: s.trajectory.states[0].t(),
                t1: s.trajectory.last().t(),
                reference_amplitude: s.problem.profile.eta0.iter().fold(0.0f64, |m, v| m.max(v.abs())),
                fixed_point: s.report.clone(),
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// `(global iteration, kappa)` over all slabs, for plotting.
    pub fn kappa_series(&self) -> Vec<(f64, f64)> {
        let mut k = 0usize;
        let mut out = Vec::new();
        for s in &self.slabs {
            for v in &s.fixed_point.kappas {
                k += 1;
                out.push((k as f64, *v));
            }
            k += 1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_distinct() {
        let codes = [
            RunStatus::Completed.exit_code(),
            RunStatus::Collision.exit_code(),
            RunStatus::HorizonFloor.exit_code(),
            RunStatus::SolverFailure.exit_code(),
            exit::CONFIG,
        ];
        assert_eq!(codes, [0, 2, 3, 4, 5]);
    }

    #[test]
    fn status_is_snake_case() {
        assert_eq!(serde_json::to_string(&RunStatus::HorizonFloor).unwrap(), "\"horizon_floor\"");
    }
}
