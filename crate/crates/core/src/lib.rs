//! Multi-armed bandits whose arms are grouped into ordered categories.
//!
//! The crate provides the instance model, the three dominance orders between
//! categories, the confidence radii and simplex subproblems used by the
//! elimination tests, the policies, closed-form regret lower bounds, and a
//! seeded experiment runner.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix it to `f64`.

pub mod confidence;
pub mod dominance;
pub mod harness;
pub mod lower_bounds;
pub mod model;
pub mod policies;
pub mod scalar;

pub use dominance::DominanceOrder;
pub use model::{Arm, ModelError};
pub use policies::{Policy, PolicyConfig, PolicyKind};
pub use scalar::Real;

pub type MeanMatrix = model::MeanMatrix<f64>;
pub type Environment = model::Environment<f64>;
pub type History = model::History<f64>;
pub type GapTable = model::GapTable<f64>;
pub type RegretTrace = model::RegretTrace<f64>;
pub type LowerBoundResult = lower_bounds::LowerBoundResult<f64>;

pub type MeanMatrixF32 = model::MeanMatrix<f32>;
pub type HistoryF32 = model::History<f32>;
