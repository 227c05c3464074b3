//! FSIB binary field snapshots.
//!
//! Little-endian layout:
//!
//! | field | type |
//! |---|---|
//! | magic | `b"FSIB"` |
//! | version | u32 (= 1) |
//! | nx, nz | u32, u32 |
//! | hx, hz, t | f64 x 3 |
//! | u1 | f64 x `nz (nx + 1)`, row-major (`j` outer) |
//! | u2 | f64 x `(nz + 1) nx` |
//! | p | f64 x `nz nx` |
//! | nb | u32 (0: no beam block) |
//! | length, horizon, dt | f64 x 3 (only if `nb > 0`) |
//! | eta0, eta, eta_t | f64 x `nb` each (only if `nb > 0`) |
//!
//! The beam block carries what a restart needs: the reference profile of the
//! slab that produced the state and the horizon and step of that slab.

use fsi_core::beam::BeamState;
use fsi_core::coupling::{CoupledState, SlabEndpoint};
use fsi_core::stokes::{FluidGrid, FluidState};

pub const MAGIC: &[u8; 4] = b"FSIB";
pub const VERSION: u32 = 1;
const MAX_CELLS: usize = 1 << 24;
const MAX_NODES: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub struct BeamBlock {
    pub length: f64,
    pub horizon: f64,
    pub dt: f64,
    pub eta0: Vec<f64>,
    pub eta: Vec<f64>,
    pub eta_t: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub nx: usize,
    pub nz: usize,
    pub hx: f64,
    pub hz: f64,
    pub t: f64,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub p: Vec<f64>,
    pub beam: Option<BeamBlock>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SnapshotError {
    #[error("not an FSIB file")]
    Magic,
    #[error("unsupported FSIB version {0}")]
    Version(u32),
    #[error("truncated FSIB data at byte {0}")]
    Truncated(usize),
    #[error("{0} trailing bytes after FSIB data")]
    Trailing(usize),
    #[error("invalid FSIB header: {0}")]
    Header(String),
}

impl Snapshot {
    pub fn from_fluid(g: &FluidGrid, s: &FluidState) -> Self {
        Self {
            nx: g.nx,
            nz: g.nz,
            hx: g.hx,
            hz: g.hz,
            t: s.t,
            u1: s.u1.clone(),
            u2: s.u2.clone(),
            p: s.p.clone(),
            beam: None,
        }
    }

    /// Slab end with everything a restart needs.
    pub fn from_endpoint(e: &SlabEndpoint) -> Self {
        let mut s = Self::from_fluid(e.problem.grid(), &e.state.fluid);
        s.beam = Some(BeamBlock {
            length: e.problem.profile.length,
            horizon: e.horizon,
            dt: e.dt,
            eta0: e.problem.profile.eta0.clone(),
            eta: e.state.beam.eta.clone(),
            eta_t: e.state.beam.eta_t.clone(),
        });
        s
    }

    pub fn fluid(&self) -> FluidState {
        FluidState {
            u1: self.u1.clone(),
            u2: self.u2.clone(),
            p: self.p.clone(),
            t: self.t,
        }
    }

    pub fn coupled_state(&self) -> Option<CoupledState> {
        let b = self.beam.as_ref()?;
        Some(CoupledState {
            fluid: self.fluid(),
            beam: BeamState {
                eta: b.eta.clone(),
                eta_t: b.eta_t.clone(),
                t: self.t,
            },
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let nb = self.beam.as_ref().map_or(0, |b| b.eta.len());
        let mut out = Vec::with_capacity(40 + 8 * (self.u1.len() + self.u2.len() + self.p.len() + 3 * nb + 3));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.nx as u32).to_le_bytes());
        out.extend_from_slice(&(self.nz as u32).to_le_bytes());
        for v in [self.hx, self.hz, self.t] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in self.u1.iter().chain(&self.u2).chain(&self.p) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&(nb as u32).to_le_bytes());
        if let Some(b) = &self.beam {
            for v in [b.length, b.horizon, b.dt] {
                out.extend_from_slice(&v.to_le_bytes());
            }
            for v in b.eta0.iter().chain(&b.eta).chain(&b.eta_t) {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self, SnapshotError> {
        let mut r = Reader { data, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(SnapshotError::Magic);
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(SnapshotError::Version(version));
        }
        let nx = r.u32()? as usize;
        let nz = r.u32()? as usize;
        if nx == 0 || nz == 0 || nx.saturating_mul(nz) > MAX_CELLS {
            return Err(SnapshotError::Header(format!("grid {nx} x {nz}")));
        }
        let hx = r.f64()?;
        let hz = r.f64()?;
        let t = r.f64()?;
        if !(hx > 0.0 && hz > 0.0 && hx.is_finite() && hz.is_finite() && t.is_finite()) {
            return Err(SnapshotError::Header(format!("hx = {hx}, hz = {hz}, t = {t}")));
        }
        let u1 = r.f64s(nz * (nx + 1))?;
        let u2 = r.f64s((nz + 1) * nx)?;
        let p = r.f64s(nz * nx)?;
        let nb = r.u32()? as usize;
        let beam = if nb == 0 {
            None
        } else {
            if !(2..=MAX_NODES).contains(&nb) {
                return Err(SnapshotError::Header(format!("{nb} beam nodes")));
            }
            let length = r.f64()?;
            let horizon = r.f64()?;
            let dt = r.f64()?;
            Some(BeamBlock {
                length,
                horizon,
                dt,
                eta0: r.f64s(nb)?,
                eta: r.f64s(nb)?,
                eta_t: r.f64s(nb)?,
            })
        };
        if r.pos != data.len() {
            return Err(SnapshotError::Trailing(data.len() - r.pos));
        }
        Ok(Self { nx, nz, hx, hz, t, u1, u2, p, beam })
    }
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], SnapshotError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.data.len()).ok_or(SnapshotError::Truncated(self.pos))?;
        let s = &self.data[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, SnapshotError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn f64(&mut self) -> Result<f64, SnapshotError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>, SnapshotError> {
        let bytes = self.take(n.checked_mul(8).ok_or(SnapshotError::Truncated(self.pos))?)?;
        Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(beam: bool) -> Snapshot {
        let (nx, nz) = (3, 2);
        Snapshot {
            nx,
            nz,
            hx: 1.0 / 3.0,
            hz: 0.5,
            t: 0.25,
            u1: (0..nz * (nx + 1)).map(|k| k as f64).collect(),
            u2: (0..(nz + 1) * nx).map(|k| -(k as f64)).collect(),
            p: vec![0.5; nz * nx],
            beam: beam.then(|| BeamBlock {
                length: 1.0,
                horizon: 0.1,
                dt: 0.01,
                eta0: vec![0.0, 0.1, 0.0],
                eta: vec![0.0, 0.2, 0.0],
                eta_t: vec![0.0, -1.0, 0.0],
            }),
        }
    }

    #[test]
    fn header_layout() {
        let b = sample(false).to_bytes();
        assert_eq!(&b[..4], b"FSIB");
        assert_eq!(u32::from_le_bytes(b[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(b[8..12].try_into().unwrap()), 3);
        assert_eq!(u32::from_le_bytes(b[12..16].try_into().unwrap()), 2);
        assert_eq!(f64::from_le_bytes(b[32..40].try_into().unwrap()), 0.25);
        assert_eq!(b.len(), 40 + 8 * (8 + 9 + 6) + 4);
    }

    #[test]
    fn round_trip() {
        for beam in [false, true] {
            let s = sample(beam);
            assert_eq!(Snapshot::from_bytes(&s.to_bytes()).unwrap(), s);
        }
    }

    #[test]
    fn rejects_damage() {
        let s = sample(true);
        let nb = s.beam.as_ref().unwrap().eta.len();
        let b = s.to_bytes();
        // arrays are read whole, so the offset is the start of the last one
        assert_eq!(Snapshot::from_bytes(&b[..b.len() - 1]), Err(SnapshotError::Truncated(b.len() - 8 * nb)));
        let mut extra = b.clone();
        extra.push(0);
        assert_eq!(Snapshot::from_bytes(&extra), Err(SnapshotError::Trailing(1)));
        let mut bad = b.clone();
        bad[0] = b'X';
        assert_eq!(Snapshot::from_bytes(&bad), Err(SnapshotError::Magic));
        let mut v2 = b;
        v2[4] = 2;
        assert_eq!(Snapshot::from_bytes(&v2), Err(SnapshotError::Version(2)));
    }
}
