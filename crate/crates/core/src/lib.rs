//! Collect-opportunity search, conflict graphs and schedulers for
//! Earth-observation constellations.
//!
//! The pipeline runs `astro` (orbits and pointing) and `tasking` (requests and
//! tiles) into `access` (collect search), then `schedcore` (scheduling
//! constraints and graphs). Schedules come from the independent-set solvers
//! in `constel_mis` or from the baselines. `experiment` drives scenarios end
//! to end.

pub mod access;
pub mod astro;
pub mod baselines;
pub mod experiment;
pub mod schedcore;
pub mod tasking;

pub use constel_mis as mis;
