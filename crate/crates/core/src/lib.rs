//! Distributionally robust contracts with deferred inspection.
//!
//! A seller allocates one good to agents whose private values `ν ∈ [0, 1]` are
//! only known through their first moments. Each agent pays its report up
//! front; after allocation the seller inspects the true value and refunds a
//! reward, leaving a net payment `p(ν)`. This crate builds the closed-form
//! robustly optimal mechanisms for one agent, computes worst-case
//! distributions, sets up the discretized linear programs for nominal and
//! multi-agent settings, and reruns the numerical studies around them.
//!
//! Linear programs are solved by the in-workspace `dri-lp` engine.

// Dense kernels read more clearly with explicit indices.
#![allow(clippy::needless_range_loop)]

pub mod adversary;
pub mod distribution;
pub mod error;
pub mod experiments;
pub mod golden;
pub mod grid;
pub mod io;
pub mod mechanism;
pub mod moments;
pub mod multi_agent;
pub mod piecewise;
pub mod single_agent;
pub mod verify;

pub use distribution::GridDistribution;
pub use error::{Error, Result};
pub use mechanism::{MechanismParams, Rule, SingleAgentMechanism};
pub use moments::MomentSet;
pub use piecewise::{Basis, PiecewiseFn, Segment};
