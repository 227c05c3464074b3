//! Benchmark sweeps. Independent scenarios run on scoped threads, at most
//! `workers` at a time; each scenario is single-threaded inside.

use crate::config::{ReferenceMode, Setup, SolverConfig};
use crate::csvio::write_rows;
use crate::report::RunStatus;
use crate::scenarios;
use fsi_core::coupling::{contraction_study, picard_solve, solve_with_continuation, ContractionSample};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

pub type BenchResult<T> = Result<T, String>;

type Job<'a, T> = Box<dyn FnOnce() -> T + Send + 'a>;

/// Runs `jobs` on up to `workers` threads; results keep the job order.
pub fn run_parallel<'a, T: Send>(jobs: Vec<Job<'a, T>>, workers: usize) -> Vec<T> {
    let n = jobs.len();
    let queue: Vec<Mutex<Option<Job<'a, T>>>> = jobs.into_iter().map(|j| Mutex::new(Some(j))).collect();
    let results: Vec<Mutex<Option<T>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..workers.clamp(1, n.max(1)) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= n {
                    break;
                }
                let job = queue[k].lock().expect("queue").take().expect("job taken once");
                *results[k].lock().expect("result") = Some(job());
            });
        }
    });
    results
        .into_iter()
        .map(|m| m.into_inner().expect("result").expect("every job ran"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionRow {
    pub scenario: String,
    pub horizon: f64,
    pub dt: f64,
    pub kappa: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn contraction_rows(name: &str, samples: &[ContractionSample]) -> Vec<ContractionRow> {
    samples
        .iter()
        .map(|s| ContractionRow {
            scenario: name.to_string(),
            horizon: s.horizon,
            dt: s.dt,
            kappa: s.kappa,
            iterations: s.residuals.len(),
            converged: s.converged,
        })
        .collect()
}

fn setup(cfg: &SolverConfig) -> BenchResult<Setup> {
    Setup::build(cfg, Path::new(".")).map_err(|e| e.to_string())
}

/// Contraction ratio at `T, T/2, ...` for one configuration.
pub fn contraction(name: &str, cfg: &SolverConfig, count: usize) -> BenchResult<Vec<ContractionRow>> {
    let s = setup(cfg)?;
    let mut pc = cfg.picard_config(1);
    pc.mu = Some(s.mu);
    let samples = contraction_study(&s.problem, &s.x0, &s.forcing, &pc, count).map_err(|e| format!("{name}: {e}"))?;
    Ok(contraction_rows(name, &samples))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphRect {
    pub graph: Vec<ContractionRow>,
    pub rect: Vec<ContractionRow>,
}

impl GraphRect {
    /// Horizons at which the graph-mode iteration converged.
    pub fn graph_converged(&self) -> Vec<f64> {
        self.graph.iter().filter(|r| r.converged).map(|r| r.horizon).collect()
    }

    /// `kappa_graph <= kappa_rect` at every common horizon.
    pub fn graph_dominates(&self) -> bool {
        self.graph
            .iter()
            .zip(&self.rect)
            .all(|(g, r)| g.horizon == r.horizon && g.kappa <= r.kappa)
    }
}

pub fn graph_rect(n: usize, count: usize, workers: usize) -> BenchResult<GraphRect> {
    let jobs: Vec<Job<'_, BenchResult<Vec<ContractionRow>>>> = vec![
        Box::new(move || contraction("graph", &scenarios::large_deformation(ReferenceMode::Graph, n), count)),
        Box::new(move || contraction("rect", &scenarios::large_deformation(ReferenceMode::Rect, n), count)),
    ];
    let mut r = run_parallel(jobs, workers).into_iter();
    let graph = r.next().expect("two jobs")?;
    let rect = r.next().expect("two jobs")?;
    Ok(GraphRect { graph, rect })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallDataRow {
    pub index: usize,
    pub r: f64,
    pub amplitude: f64,
    pub status: RunStatus,
    pub end_time: f64,
    pub slabs: usize,
    /// Shortest converged slab.
    pub min_horizon: f64,
    pub halvings: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallData {
    pub rows: Vec<SmallDataRow>,
    /// First index from which every smaller scale completes `[0, T0]`.
    pub threshold: Option<usize>,
}

fn small_data_row(index: usize, r: f64, n: usize) -> BenchResult<SmallDataRow> {
    let cfg = scenarios::small_data(r, n);
    let s = setup(&cfg)?;
    let mut pc = cfg.picard_config(1);
    pc.mu = Some(s.mu);
    let t0 = Instant::now();
    let c = solve_with_continuation(&s.problem, &s.x0, &s.forcing, &pc, &cfg.continuation()).map_err(|e| format!("r = {r}: {e}"))?;
    let ok: Vec<_> = c
        .slabs
        .iter()
        .filter(|s| s.report.status == fsi_core::coupling::PicardStatus::Converged)
        .collect();
    Ok(SmallDataRow {
        index,
        r,
        amplitude: scenarios::SMALL_DATA_AMPLITUDE * r,
        status: RunStatus::of(&c, cfg.run.target),
        end_time: ok.last().map_or(0.0, |s| s.trajectory.last().t()),
        slabs: ok.len(),
        min_horizon: ok.iter().map(|s| s.report.horizon).fold(f64::INFINITY, f64::min),
        halvings: c.slabs.iter().map(|s| s.report.halvings.len()).sum(),
        seconds: t0.elapsed().as_secs_f64(),
    })
}

pub fn threshold_index(completed: &[bool]) -> Option<usize> {
    let k = completed.iter().rposition(|c| !c).map_or(0, |k| k + 1);
    (k < completed.len()).then_some(k)
}

pub fn small_data(n: usize, workers: usize) -> BenchResult<SmallData> {
    let jobs: Vec<Job<'_, BenchResult<SmallDataRow>>> = scenarios::SMALL_DATA_SCALES
        .iter()
        .enumerate()
        .map(|(k, &r)| Box::new(move || small_data_row(k, r, n)) as Job<'_, _>)
        .collect();
    let rows = run_parallel(jobs, workers).into_iter().collect::<BenchResult<Vec<_>>>()?;
    let done: Vec<bool> = rows.iter().map(|r| r.status == RunStatus::Completed).collect();
    Ok(SmallData {
        threshold: threshold_index(&done),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub n: usize,
    pub unknowns: usize,
    pub seconds: f64,
    pub iterations: usize,
    pub kappa: f64,
    pub converged: bool,
}

/// One slab of the moderate scenario per grid.
pub fn grid_timing(sizes: &[usize], workers: usize) -> BenchResult<Vec<GridRow>> {
    let jobs: Vec<Job<'_, BenchResult<GridRow>>> = sizes
        .iter()
        .map(|&n| {
            Box::new(move || {
                let cfg = scenarios::moderate(n);
                let s = setup(&cfg)?;
                let mut pc = cfg.picard_config(1);
                pc.mu = Some(s.mu);
                let t0 = Instant::now();
                let out = picard_solve(&s.problem, &s.x0, &s.forcing, &pc).map_err(|e| format!("n = {n}: {e}"))?;
                let g = s.problem.grid();
                Ok(GridRow {
                    n,
                    unknowns: g.nvel() + g.ncell() + 2 * s.problem.nodes(),
                    seconds: t0.elapsed().as_secs_f64(),
                    iterations: out.report.iterations,
                    kappa: out.report.kappas.last().copied().unwrap_or(0.0),
                    converged: out.converged(),
                })
            }) as Job<'_, _>
        })
        .collect();
    run_parallel(jobs, workers).into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Contraction,
    GraphRect,
    SmallData,
    Grid,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Contraction, Suite::GraphRect, Suite::SmallData, Suite::Grid];

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "a" | "contraction" => Suite::Contraction,
            "b" | "graph-rect" => Suite::GraphRect,
            "c" | "small-data" => Suite::SmallData,
            "d" | "grid" => Suite::Grid,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Contraction => "contraction",
            Suite::GraphRect => "graph-rect",
            Suite::SmallData => "small-data",
            Suite::Grid => "grid",
        }
    }
}

/// Runs one suite at grid `n` and writes `bench_<name>.json` and
/// `bench_<name>.csv` to `out`.
pub fn run_suite(suite: Suite, n: usize, workers: usize, out: &Path) -> BenchResult<Vec<PathBuf>> {
    std::fs::create_dir_all(out).map_err(|e| format!("{}: {e}", out.display()))?;
    let stem = out.join(format!("bench_{}", suite.name()));
    let (json, csv) = match suite {
        Suite::Contraction => {
            let rows = contraction("moderate", &scenarios::moderate(n), 4)?;
            (serde_json::to_value(&rows), csv_text(&rows))
        }
        Suite::GraphRect => {
            let r = graph_rect(n, 4, workers)?;
            let rows: Vec<_> = r.graph.iter().chain(&r.rect).cloned().collect();
            let v = serde_json::json!({
                "graph": r.graph,
                "rect": r.rect,
                "graph_converged_at": r.graph_converged(),
                "graph_dominates": r.graph_dominates(),
            });
            (Ok(v), csv_text(&rows))
        }
        Suite::SmallData => {
            let r = small_data(n, workers)?;
            (serde_json::to_value(&r), csv_text(&r.rows))
        }
        Suite::Grid => {
            let sizes: Vec<usize> = [n / 2, n, 2 * n].into_iter().filter(|&m| m >= 4).collect();
            let rows = grid_timing(&sizes, workers)?;
            (serde_json::to_value(&rows), csv_text(&rows))
        }
    };
    let json = serde_json::to_string_pretty(&json.map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let jp = stem.with_extension("json");
    let cp = stem.with_extension("csv");
    std::fs::write(&jp, json).map_err(|e| format!("{}: {e}", jp.display()))?;
    std::fs::write(&cp, csv?).map_err(|e| format!("{}: {e}", cp.display()))?;
    Ok(vec![jp, cp])
}

fn csv_text<T: Serialize>(rows: &[T]) -> BenchResult<String> {
    let mut buf = Vec::new();
    write_rows(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_keeps_order() {
        let jobs: Vec<Job<'_, usize>> = (0..7usize).map(|k| Box::new(move || k * k) as Job<'_, usize>).collect();
        assert_eq!(run_parallel(jobs, 3), vec![0, 1, 4, 9, 16, 25, 36]);
        assert!(run_parallel::<usize>(Vec::new(), 4).is_empty());
    }

    #[test]
    fn threshold_cases() {
        assert_eq!(threshold_index(&[false, false, true, true]), Some(2));
        assert_eq!(threshold_index(&[true, true]), Some(0));
        assert_eq!(threshold_index(&[true, false]), None);
        assert_eq!(threshold_index(&[false, true, false, true]), Some(3));
    }

    #[test]
    fn suite_names() {
        for s in Suite::ALL {
            assert_eq!(Suite::parse(s.name()), Some(s));
        }
        assert_eq!(Suite::parse("c"), Some(Suite::SmallData));
        assert_eq!(Suite::parse("x"), None);
    }
}
