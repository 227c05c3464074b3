//! Named configurations used by `bench`, `verify` and the tests.

use crate::config::{ProfileSpec, ReferenceMode, SolverConfig};

fn base(n: usize) -> SolverConfig {
    let mut c = SolverConfig::default();
    c.discretization.nx = n;
    c.discretization.nz = n;
    c.output.snapshot_every = 0;
    c
}

/// Flat channel at rest, beam released with velocity `0.1 * bump`.
pub fn moderate(n: usize) -> SolverConfig {
    let mut c = base(n);
    c.geometry.eta2 = ProfileSpec::Bump { amplitude: 0.1 };
    c.picard.horizon = 0.2;
    c.discretization.dt = 0.0125;
    c.picard.tol = 1e-10;
    c.run.target = 0.2;
    c
}

/// Initial displacement `0.5 * bump` and velocity `0.1 * bump`. Graph mode
/// takes the displaced channel as reference; rect mode keeps the flat one.
pub fn large_deformation(mode: ReferenceMode, n: usize) -> SolverConfig {
    let mut c = moderate(n);
    c.geometry.mode = mode;
    c.geometry.eta1 = ProfileSpec::Bump { amplitude: 0.5 };
    c.geometry.allow_reference_offset = mode == ReferenceMode::Rect;
    c.picard.max_iter = 60;
    c
}

/// Base amplitude of the small-data sweep.
pub const SMALL_DATA_AMPLITUDE: f64 = 16.0;
pub const SMALL_DATA_SCALES: [f64; 4] = [1.0, 0.5, 0.25, 0.125];

/// Beam velocity `16 r * bump` on a flat channel, one slab of length 1.
pub fn small_data(r: f64, n: usize) -> SolverConfig {
    let mut c = base(n);
    c.geometry.eta2 = ProfileSpec::Bump {
        amplitude: SMALL_DATA_AMPLITUDE,
    };
    c.geometry.data_scale = r;
    c.picard.horizon = 1.0;
    c.picard.t_min = Some(1.0 / 64.0);
    c.discretization.dt = 1.0 / 64.0;
    c.run.target = 1.0;
    c
}

/// Homogeneous run for the energy balance.
pub fn homogeneous(n: usize) -> SolverConfig {
    let mut c = base(n);
    c.geometry.eta2 = ProfileSpec::Bump { amplitude: 0.1 };
    c.picard.horizon = 0.1;
    c.discretization.dt = 0.01;
    c.run.target = 0.1;
    c
}

/// Heavy downward load on the beam; the channel closes before `t = 1`.
pub fn pinch(n: usize) -> SolverConfig {
    let mut c = base(n);
    c.forcing.load = -PINCH_LOAD;
    c.picard.horizon = 0.1;
    c.discretization.dt = 0.0125;
    c.run.target = 1.0;
    c.run.max_slabs = 200;
    c
}

pub const PINCH_LOAD: f64 = 400.0;

pub fn by_name(name: &str, n: usize) -> Option<SolverConfig> {
    Some(match name {
        "moderate" => moderate(n),
        "large-graph" => large_deformation(ReferenceMode::Graph, n),
        "large-rect" => large_deformation(ReferenceMode::Rect, n),
        "small-data" => small_data(1.0, n),
        "homogeneous" => homogeneous(n),
        "pinch" => pinch(n),
        _ => return None,
    })
}

pub const NAMES: [&str; 6] = ["moderate", "large-graph", "large-rect", "small-data", "homogeneous", "pinch"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_scenarios_validate() {
        for name in NAMES {
            let c = by_name(name, 16).unwrap();
            assert!(c.check().is_empty(), "{name}: {:?}", c.check());
        }
        assert!(by_name("nope", 16).is_none());
    }
}
