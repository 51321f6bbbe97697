//! Maximum independent set solvers for large sparse graphs.
//!
//! The pipeline used for scheduling is [`redumis_solve`]: exact
//! kernelization, an evolutionary search on the kernel driven by node
//! separators and 2-improvement local search, then lifting back to the
//! original graph. [`exact_bnb`] is a branch-and-reduce solver for small
//! instances and serves as an optimality oracle.

mod error;
mod evolve;
mod exact;
mod graph;
mod greedy;
pub mod io;
pub mod kernel;
mod local_search;
mod redumis;
mod separator;
mod solution;

pub use error::MisError;
pub use evolve::evolve;
pub use exact::{clique_cover_bound, exact_bnb};
pub use graph::CsrGraph;
pub use greedy::{greedy_min_degree, greedy_seed};
pub use kernel::{kernelize, kernelize_with, Kernel};
pub use local_search::two_improvement;
pub use redumis::redumis_solve;
pub use separator::{partition_separator, Part, Separation};
pub use solution::{IndependentSetSolution, ReductionSummary, ReductionToggles, SolverConfig, Termination};
