//! CSV tables: beam trajectory, energy series, profile columns, field dumps.

use fsi_core::coupling::{EnergySample, Trajectory};
use fsi_core::stokes::{FluidGrid, FluidState};
use serde::{Deserialize, Serialize};
use std::io::Write;

pub type CsvResult<T> = std::result::Result<T, String>;

/// One row of the beam CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamRow {
    pub t: f64,
    pub x: f64,
    pub eta: f64,
    pub eta_t: f64,
}

/// Rows `(t, x, eta, eta_t)` for every level; `skip_first` drops the first
/// level (a slab junction already written).
pub fn beam_rows(traj: &Trajectory, length: f64, skip_first: bool) -> Vec<BeamRow> {
    let mut out = Vec::new();
    for s in traj.states.iter().skip(usize::from(skip_first)) {
        let n = s.beam.eta.len();
        let h = length / (n - 1) as f64;
        for k in 0..n {
            out.push(BeamRow {
                t: s.beam.t,
                x: k as f64 * h,
                eta: s.beam.eta[k],
                eta_t: s.beam.eta_t[k],
            });
        }
    }
    out
}

pub fn write_rows<T: Serialize, W: Write>(rows: &[T], w: W) -> CsvResult<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r).map_err(|e| e.to_string())?;
    }
    wr.flush().map_err(|e| e.to_string())
}

pub fn read_rows<T: for<'de> Deserialize<'de>>(text: &str) -> CsvResult<Vec<T>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    rd.deserialize().map(|r| r.map_err(|e| e.to_string())).collect()
}

pub fn read_beam_csv(text: &str) -> CsvResult<Vec<BeamRow>> {
    read_rows(text)
}

pub fn read_energy_csv(text: &str) -> CsvResult<Vec<EnergySample>> {
    read_rows(text)
}

/// `min(1 + eta)` per time, in order of appearance.
pub fn gap_series(rows: &[BeamRow]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for r in rows {
        match out.last_mut() {
            Some(last) if last.0 == r.t => last.1 = last.1.min(1.0 + r.eta),
            _ => out.push((r.t, 1.0 + r.eta)),
        }
    }
    out
}

/// Nodal values from a CSV with a header row. Blank cells are errors.
pub fn read_profile_csv(text: &str, column: Option<&str>) -> CsvResult<Vec<f64>> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rd.headers().map_err(|e| e.to_string())?.clone();
    if headers.is_empty() {
        return Err("no columns".into());
    }
    let idx = match column {
        None => 0,
        Some(c) => headers
            .iter()
            .position(|h| h == c)
            .ok_or_else(|| format!("no column named {c:?}"))?,
    };
    let mut out = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let cell = rec.get(idx).ok_or_else(|| format!("row {} has no column {idx}", line + 2))?;
        let v: f64 = cell.parse().map_err(|_| format!("row {}: {cell:?} is not a number", line + 2))?;
        if !v.is_finite() {
            return Err(format!("row {}: value is not finite", line + 2));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err("no data rows".into());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct FieldRow {
    component: &'static str,
    i: usize,
    j: usize,
    x: f64,
    z: f64,
    value: f64,
}

/// Long-format dump `(component, i, j, x, z, value)` of `u1`, `u2` and `p`.
pub fn write_field_csv<W: Write>(g: &FluidGrid, s: &FluidState, w: W) -> CsvResult<()> {
    let mut rows = Vec::with_capacity(g.nvel() + g.ncell());
    for j in 0..g.nz {
        for i in 0..=g.nx {
            rows.push(FieldRow { component: "u1", i, j, x: g.x_face(i), z: g.z_center(j), value: s.u1[j * (g.nx + 1) + i] });
        }
    }
    for j in 0..=g.nz {
        for i in 0..g.nx {
            rows.push(FieldRow { component: "u2", i, j, x: g.x_center(i), z: g.z_face(j), value: s.u2[j * g.nx + i] });
        }
    }
    for j in 0..g.nz {
        for i in 0..g.nx {
            rows.push(FieldRow { component: "p", i, j, x: g.x_center(i), z: g.z_center(j), value: s.p[g.cell(i, j)] });
        }
    }
    write_rows(&rows, w)
}
