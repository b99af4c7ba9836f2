//! Exact solving of small instances plus the model and cut machinery.

pub mod backoff;
pub mod bnb;
pub mod dual_ascent;
pub mod heuristic;
pub mod ilp;
pub mod separation;

use std::time::Instant;

use crate::error::Result;
use crate::graph::CompactGraph;

pub use bnb::bnb_drive;

#[derive(Clone, Debug, Default)]
pub struct SolverConfig {
    /// Wall-clock cutoff shared by every sub-solve.
    pub deadline: Option<Instant>,
    /// Maximum number of processed search nodes per solve.
    pub node_limit: Option<u64>,
    /// Tie-break seed for the order of root subproblems.
    pub seed: u64,
    /// Keep `(incumbent, bound)` for every processed search node.
    pub record_bounds: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchStats {
    pub nodes: u64,
    pub heuristic_calls: u64,
    pub ascents: u64,
    pub bound_log: Vec<(f64, f64)>,
}

/// Result of a solve over local indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub nodes: Vec<usize>,
    pub objective: f64,
    pub lower: f64,
    pub upper: f64,
    pub optimal: bool,
    pub stats: SearchStats,
}

impl Outcome {
    pub(crate) fn exact(nodes: Vec<usize>, objective: f64, stats: SearchStats) -> Self {
        Outcome {
            nodes,
            objective,
            lower: objective,
            upper: objective,
            optimal: true,
            stats,
        }
    }
}

pub fn solve_unrooted(g: &CompactGraph, cfg: &SolverConfig) -> Result<Outcome> {
    bnb_drive(g, None, cfg)
}

/// Rooted solve; an empty root set falls back to the unrooted problem.
pub fn solve_rooted(g: &CompactGraph, roots: &[usize], cfg: &SolverConfig) -> Result<Outcome> {
    bnb_drive(g, Some(roots), cfg)
}
