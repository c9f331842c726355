//! Counting and sampling graphs without an induced five-cycle, and the
//! structural tools around them: generalised split and perfect recognition,
//! exact and Monte Carlo census, homogeneous-set certificates, and coloured
//! type reduction.

pub mod census;
pub mod entropy;
pub mod generators;
pub mod graph;
pub mod homsets;
pub mod recognizers;
pub mod rng;
pub mod types;

pub use graph::{Graph, GraphBuilder, GraphError, Partition, VertexSet};
