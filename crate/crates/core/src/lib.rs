//! Random k-core robustness toolkit.
//!
//! Given a random k-core, delete one uniformly random edge and peel the
//! graph back to its k-core. This crate samples the random k-cores
//! (allocation and pairing models, uniform simple k-cores, `G(n,m)`),
//! runs the peeling cascade at point, vertex and pairing-allocation level,
//! couples the cascade to three random walks, evaluates the fluid-limit
//! trajectories of the pairing-allocation peel, and drives Monte Carlo
//! experiments over the three robustness regimes.

pub mod analytic;
pub mod degseq;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod graphgen;
pub mod ode;
pub mod peel;
pub mod rng;
pub mod walks;

pub use error::{Error, Result};
pub use graph::Multigraph;
