//! `plot`: SVG figures from the files of a run directory.

use crate::csvio::{gap_series, read_beam_csv, read_energy_csv};
use crate::report::RunReport;
use crate::runner::{BEAM_CSV, ENERGY_CSV, REPORT};
use crate::snapshot::Snapshot;
use crate::svg::{heatmap, line_plot, Series};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum PlotError {
    #[error("{path}: {msg}")]
    Input { path: PathBuf, msg: String },
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
}

fn input(path: &Path, msg: impl ToString) -> PlotError {
    PlotError::Input {
        path: path.to_path_buf(),
        msg: msg.to_string(),
    }
}

/// Cell-centred speed from face values.
pub fn cell_speed(s: &Snapshot) -> Vec<f64> {
    let (nx, nz) = (s.nx, s.nz);
    let mut out = vec![0.0; nx * nz];
    for j in 0..nz {
        for i in 0..nx {
            let a = 0.5 * (s.u1[j * (nx + 1) + i] + s.u1[j * (nx + 1) + i + 1]);
            let b = 0.5 * (s.u2[j * nx + i] + s.u2[(j + 1) * nx + i]);
            out[j * nx + i] = a.hypot(b);
        }
    }
    out
}

/// Snapshots in `dir`, sorted by name.
pub fn snapshot_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .map(|rd| {
            rd.filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "fsib"))
                .collect()
        })
        .unwrap_or_default();
    v.sort();
    v
}

/// First, middle and last of a list.
fn selection<T: Clone>(v: &[T]) -> Vec<T> {
    let mut idx = vec![0, v.len() / 2, v.len().saturating_sub(1)];
    idx.dedup();
    idx.into_iter().filter_map(|k| v.get(k).cloned()).collect()
}

/// Writes every figure whose input exists in `dir` to `out`; returns the
/// written paths.
pub fn plot_dir(dir: &Path, out: &Path) -> Result<Vec<PathBuf>, PlotError> {
    fs::create_dir_all(out).map_err(|source| PlotError::Output {
        path: out.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    let mut emit = |name: String, svg: String| -> Result<(), PlotError> {
        let p = out.join(name);
        fs::write(&p, svg).map_err(|source| PlotError::Output { path: p.clone(), source })?;
        written.push(p);
        Ok(())
    };
    let read = |p: &Path| fs::read_to_string(p).map_err(|e| input(p, e));

    let ep = dir.join(ENERGY_CSV);
    if ep.exists() {
        let e = read_energy_csv(&read(&ep)?).map_err(|m| input(&ep, m))?;
        let series = vec![
            Series::new("total", e.iter().map(|s| (s.t, s.total)).collect()),
            Series::new("fluid kinetic", e.iter().map(|s| (s.t, s.fluid_kinetic)).collect()),
            Series::new("beam kinetic", e.iter().map(|s| (s.t, s.beam_kinetic)).collect()),
            Series::new("beam potential", e.iter().map(|s| (s.t, s.beam_potential)).collect()),
        ];
        emit("energy.svg".into(), line_plot("Energy", "t", "E", &series, false))?;
    }
    let rp = dir.join(REPORT);
    if rp.exists() {
        let r = RunReport::from_json(&read(&rp)?).map_err(|e| input(&rp, e))?;
        let k = r.kappa_series();
        emit(
            "kappa.svg".into(),
            line_plot("Contraction ratio", "iteration (all slabs)", "kappa", &[Series::new("kappa", k)], true),
        )?;
    }
    let bp = dir.join(BEAM_CSV);
    if bp.exists() {
        let rows = read_beam_csv(&read(&bp)?).map_err(|m| input(&bp, m))?;
        emit(
            "gap.svg".into(),
            line_plot("Channel gap", "t", "min(1 + eta)", &[Series::new("min(1+eta)", gap_series(&rows))], false),
        )?;
    }
    for p in selection(&snapshot_files(dir)) {
        let s = Snapshot::from_bytes(&fs::read(&p).map_err(|e| input(&p, e))?).map_err(|e| input(&p, e))?;
        let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("snap").to_string();
        let aspect = (s.nx as f64 * s.hx) / (s.nz as f64 * s.hz);
        let title = format!("|u| on the reference grid, t = {:.4}", s.t);
        emit(format!("speed_{stem}.svg"), heatmap(&title, s.nx, s.nz, &cell_speed(&s), aspect))?;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_dedups() {
        assert_eq!(selection(&[1]), vec![1]);
        assert_eq!(selection(&[1, 2]), vec![1, 2]);
        assert_eq!(selection(&[1, 2, 3, 4, 5]), vec![1, 3, 5]);
        assert!(selection::<i32>(&[]).is_empty());
    }
}
