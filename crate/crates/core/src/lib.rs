//! Cooperative message censoring for energy-limited multihop sensor networks.
//!
//! * [`model`]: routing trees, cost matrices, importance distributions and
//!   scenario builders / files.
//! * [`exact`]: optimal thresholds by backward recursion over the energy
//!   lattice (small networks).
//! * [`asymptotic`]: constant thresholds from critical-node lifetimes and a
//!   linear value approximation (any tree size).
//! * [`sim`]: epoch-driven Monte Carlo evaluation of censoring strategies.

pub mod asymptotic;
pub mod error;
pub mod exact;
pub mod model;
pub mod roots;
pub mod sim;

pub use error::{Error, Result};
pub use model::{ImportanceModel, RoutingTree, Scenario};
