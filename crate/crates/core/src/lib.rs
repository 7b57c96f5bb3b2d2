//! Correlation clustering by local search with weight flips.
//!
//! The crate provides exact cost accounting, exhaustive and sampled local
//! search engines, the flip pipelines built on top of them, the three-way
//! pivot combiner, preclustering, baselines and brute-force oracles.

pub mod baselines;
pub mod clustering;
pub mod cost;
pub mod error;
pub mod exact;
pub mod flip;
pub mod generators;
pub mod graph;
pub mod pivot;
pub mod precluster;
pub mod rng;
pub mod sampled;
pub mod search;
pub mod verify;
pub mod weight;

pub use clustering::Clustering;
pub use cost::{cost, delta_cost, total_cost, CostBreakdown};
pub use error::{Error, Result};
pub use graph::{Graph, PairClass};
pub use weight::{flip_weights, Cost, WeightFn};
