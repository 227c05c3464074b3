//! Fluid core on the flattened reference rectangle.

pub mod elliptic;
pub mod grid;
pub mod lifting;
pub mod neumann;
pub mod ops;
pub mod pressure;
pub mod projector;
pub mod system;
pub mod transfer;

pub use elliptic::EllipticSolver;
pub use grid::{Boundary, FluidGrid, FluidState, Metric};
pub use lifting::{lift_divfree, TopTrace};
pub use ops::{Operators, WallBc};
pub use projector::{Projection, ProjectionRoute, Projector};
pub use system::{dirichlet_lift, stokes_solve_steady, unsteady_stokes_step, StokesData, StokesSolver};
pub use neumann::{apply_n0, assemble_ns, NeumannMaps};
pub use pressure::{decompose_pressure, PressureSplit};
pub use transfer::Transfer;
