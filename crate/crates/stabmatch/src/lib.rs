//! Stability regions of stochastic matching models on compatibility
//! multigraphs: exact membership tests for the Hall-type regions, the
//! constructive edge-weight decompositions and their Farkas certificates,
//! the reversible random-walk correspondence, discrete-event simulators for
//! the general and extended bipartite matching models, and closed-form
//! matching rates on the policy-invariant topologies.

pub mod closed_form;
pub mod decompose;
pub mod error;
pub mod flow;
pub mod graph;
pub mod measure;
pub mod rat;
pub mod report;
pub mod sim;
pub mod sim_bipartite;
pub mod simplex;
pub mod stability;
pub mod verify;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{Bipartition, Edge, Multigraph, TopologyClass, TopologyTag};
pub use measure::{EdgeWeights, NodeMeasure, Positivity};
pub use rat::Rat;
