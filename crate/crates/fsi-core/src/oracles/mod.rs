//! Independent reference computations used by tests and `verify`.

pub mod coupled;
pub mod dense;
pub mod manufactured;
pub mod suite;
pub mod symmetry;
pub mod terms;

pub use dense::{dense_beam_frequency, DenseProjector, dense_beam_stiffness, dense_projection};
pub use symmetry::{symmetry_harness, SymmetryReport};
pub use manufactured::{observed_orders, StokesCase};
pub use coupled::{CoupledCase, TimeProfile};
pub use suite::{manufactured_suite, reference_collapse, ConvergenceRow, SuiteConfig};
pub use terms::plain_convection;
