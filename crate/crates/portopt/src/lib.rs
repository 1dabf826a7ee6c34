//! Two-stage stochastic optimization for inland-port infrastructure
//! investment under demand uncertainty.
//!
//! First-stage integer decisions buy port handling equipment and storage
//! under a budget; second-stage decisions route commodities over truck,
//! rail, and barge for each demand scenario. The solver is an L-shaped
//! (Benders) decomposition with optional knapsack-inequality and
//! Magnanti-Wong Pareto-optimal-cut acceleration, backed by an in-crate
//! simplex and branch-and-bound kernel.
//!
//! See the `examples/` directory for runnable entry points per capability;
//! the `portopt` binary exposes the same operations as a CLI.

pub mod analysis;
pub mod benders;
pub mod builders;
pub mod cli;
pub mod error;
pub mod generate;
pub mod io;
pub mod lp;
pub mod milp;
pub mod model;

pub use error::{Error, Result};
