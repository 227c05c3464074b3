//! Transfer between beam nodes and the top faces of the fluid grid.
//!
//! `T` interpolates nodal values linearly to face centers. Loads go the
//! other way through the weighted adjoint `P = W_b^{-1} T^t W_f`, so that
//! `<P f, e>_beam = <f, T e>_fluid` for clamped `e`. End rows of `P` vanish.

use crate::error::{check_len, FsiError, Result};
use crate::linalg::{Csr, TripletBuilder};
use crate::stokes::grid::FluidGrid;

#[derive(Debug, Clone)]
pub struct Transfer {
    pub nodes: usize,
    pub nx: usize,
    /// `nx x nodes`.
    pub to_fluid: Csr,
    /// `nodes x nx`.
    pub to_beam: Csr,
}

impl Transfer {
    pub fn new(grid: &FluidGrid, nodes: usize) -> Result<Self> {
        if nodes < 7 {
            return Err(FsiError::Config(format!("beam needs at least 7 nodes, got {nodes}")));
        }
        let hb = grid.length / (nodes - 1) as f64;
        let mut t = TripletBuilder::new(grid.nx, nodes);
        for i in 0..grid.nx {
            let s = grid.x_center(i) / hb;
            let k = (s.floor() as usize).min(nodes - 2);
            let w = s - k as f64;
            t.push(i, k, 1.0 - w);
            t.push(i, k + 1, w);
        }
        let to_fluid = t.build();
        let tt = to_fluid.transpose();
        let mut p = TripletBuilder::new(nodes, grid.nx);
        for k in 1..nodes - 1 {
            for (i, v) in tt.row(k) {
                p.push(k, i, v * grid.hx / hb);
            }
        }
        Ok(Self {
            nodes,
            nx: grid.nx,
            to_fluid,
            to_beam: p.build(),
        })
    }

    pub fn fluid(&self, beam: &[f64]) -> Result<Vec<f64>> {
        check_len("beam field", self.nodes, beam.len())?;
        Ok(self.to_fluid.matvec(beam))
    }

    pub fn beam(&self, faces: &[f64]) -> Result<Vec<f64>> {
        check_len("top-face field", self.nx, faces.len())?;
        Ok(self.to_beam.matvec(faces))
    }
}
