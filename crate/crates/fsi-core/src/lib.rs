pub mod beam;
pub mod coupling;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod nonlinear;
pub mod oracles;
pub mod stokes;

pub use error::{FsiError, Result};
