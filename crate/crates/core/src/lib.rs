//! Rotor-router groups on wired directed covers of finite graphs.
//!
//! A strongly connected base graph generates a periodic tree; truncating it
//! at height `h` and contracting the leaves together with the root's
//! ancestor gives a finite graph with a sink. This crate computes the order
//! of its rotor-router group through a forest-counting recursion, the order
//! of the root element through an lcm recursion, the associated exit
//! probabilities, and checks all of them against direct simulation and
//! matrix-tree determinants.

pub mod cover;
pub mod error;
pub mod exec;
pub mod forest;
pub mod graph;
pub mod root_order;
pub mod rotor;
pub mod sandpile;

pub use cover::{CoverTree, Target, WiredTree};
pub use error::{Error, Result};
pub use exec::Execution;
pub use forest::{forest_recursion, gamma_sequence, group_order, fixed_point, asymptotic_slope, ForestTable};
pub use graph::{BaseGraph, Label};
pub use root_order::{hitting_probabilities, root_order_recursion, root_order_simulated, RootOrderTable};
pub use rotor::{Exit, RotorConfig};
pub use sandpile::{ChipConfig, ReducedLaplacian};
