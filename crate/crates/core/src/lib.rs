//! Structural stability of sparse zero-patterns.
//!
//! A zero-pattern is stored as a graph with self-loops ([`graph::Graph`]) or,
//! for non-symmetric patterns, a digraph ([`graph::Digraph`]). Symmetric
//! patterns are stable exactly when every connected component carries a loop
//! and the graph has a Hamiltonian decomposition; [`stability`] decides this
//! with certificates. [`models`] samples the two random graph models,
//! [`montecarlo`] estimates stability probabilities and [`asymptotics`] gives
//! their large-n limits. [`oracle`] cross-checks verdicts numerically.

pub mod asymptotics;
pub mod error;
pub mod graph;
pub mod matching;
pub mod models;
pub mod montecarlo;
pub mod oracle;
pub mod stability;

pub use error::{Error, Result};
pub use graph::{Adjacency, Digraph, Graph, VertexSet, ZeroPattern};
