//! Exact solver for the maximum-weight connected subgraph problem and its
//! rooted variant.

pub mod decompose;
pub mod error;
pub mod generate;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod pipeline;
pub mod preprocess;
pub mod solver;
pub mod transforms;

pub use error::{Error, Result};
pub use graph::{CompactGraph, Instance, NodeId, ReductionTrace, Solution, Status, WeightedGraph};
pub use pipeline::{run, Mode, RunConfig, RunReport};
pub use preprocess::{preprocess, PreprocessConfig, RuleReport};
pub use solver::SolverConfig;
