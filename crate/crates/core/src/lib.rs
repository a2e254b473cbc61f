//! Foundational numeric types shared by every other crate in the workspace:
//! objective and weight vectors, discount factors, reproducible random
//! streams, simplex sampling and lattices, and discounted-return arithmetic.

mod error;
mod returns;
mod rng;
mod simplex;
mod vectors;

pub use error::CoreError;
pub use returns::discounted_return;
pub use rng::RngStream;
pub use simplex::{lattice_granularity, sample_simplex_uniform, simplex_lattice};
pub use vectors::{scalarize, DiscountSpec, ObjectiveVector, WeightVector, WEIGHT_SUM_TOLERANCE};

pub type Result<T, E = CoreError> = std::result::Result<T, E>;
