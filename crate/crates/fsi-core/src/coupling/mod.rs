//! Linear coupled fluid/beam solver and the nonlinear fixed-point driver.

pub mod continuation;
pub mod energy;
pub mod monolithic;
pub mod norms;
pub mod partitioned;
pub mod picard;
pub mod problem;

pub use continuation::{continue_solution, remap_state, resume, solve_with_continuation, Continuation, ContinuationConfig, Junction, Slab, SlabEndpoint};
pub use energy::{energy_report, max_energy_increase, EnergySample};
pub use monolithic::{kinematic_residual, linear_coupled_solve, LinearCoupledSolver};
pub use norms::{trajectory_norm, NormWeights};
pub use partitioned::{partitioned_step, AddedMass, PartitionedConfig, PartitionedSolver, SubiterReport};
pub use picard::{
    check_ball, contraction_study, forcing_bundle, picard_map, picard_solve, ContractionSample, FixedPointReport,
    Forcing, HalvingEvent, HalvingReason, NoForcing, Nonlinearity, PicardConfig, PicardOutcome, PicardStatus, SlabMap,
};
pub use problem::{collision_guard, prepare_initial, CoupledProblem, CoupledState, PreparedInitial, Trajectory};
