//! A small, deterministic linear-programming engine.
//!
//! Models are built as [`LinearProgram`] values (sparse rows, variable bounds,
//! objective) and solved with [`solve`]. The solver runs a presolve pass
//! (fixed variables, `x_a = x_b` aggregation, duplicate rows), equilibrates the
//! remaining system, and then runs a two-phase bounded-variable primal simplex.
//! The basis is kept as a set of unit columns plus a small dense kernel whose
//! inverse is updated in place, which suits the tall, sparse programs this
//! workspace produces (many rows, few structural variables in the basis).
//!
//! Every optimal [`LpSolution`] carries row duals and reduced costs;
//! [`LinearProgram::certificate`] checks them against the original model.

// Dense kernels read more clearly with explicit indices.
#![allow(clippy::needless_range_loop)]

mod error;
mod kernel;
mod model;
mod mps;
mod presolve;
mod scale;
mod simplex;
mod solution;

pub use error::LpError;
pub use model::{LinearProgram, Relation, Row, Sense};
pub use mps::write_mps;
pub use simplex::SolveOptions;
pub use solution::{Certificate, LpSolution, LpStatus};

/// Engine version recorded in solver-produced artifacts.
pub const ENGINE_VERSION: &str = concat!("dri-lp/", env!("CARGO_PKG_VERSION"));

/// Solve `lp` with default options.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    solve_with(lp, &SolveOptions::default())
}

/// Solve `lp` with explicit options.
pub fn solve_with(lp: &LinearProgram, opts: &SolveOptions) -> Result<LpSolution, LpError> {
    lp.validate()?;
    simplex::run(lp, opts)
}
