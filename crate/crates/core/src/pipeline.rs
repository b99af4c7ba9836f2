//! The three solve configurations: the bare solver, preprocessing followed
//! by the solver, and the full decomposition scheme.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::decompose::{solve_mwcs, DcConfig, DcReport};
use crate::error::{Error, Result};
use crate::graph::{Instance, NodeId, Solution, Status, WeightedGraph};
use crate::preprocess::{preprocess, PreprocessConfig, RuleReport};
use crate::solver::{bnb_drive, Outcome, SolverConfig};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    NoPre,
    Pre,
    #[default]
    Dc,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::NoPre, Mode::Pre, Mode::Dc];

    pub fn name(self) -> &'static str {
        match self {
            Mode::NoPre => "no-pre",
            Mode::Pre => "pre",
            Mode::Dc => "dc",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown mode {s:?}")))
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub mode: Mode,
    pub solver: SolverConfig,
    pub preprocess: PreprocessConfig,
    /// Accept the empty set (objective 0) when every connected set is
    /// negative. Ignored for rooted runs.
    pub allow_empty: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RunReport {
    pub mode: Mode,
    pub nodes_before: usize,
    pub edges_before: usize,
    pub nodes_after: usize,
    pub edges_after: usize,
    pub components_after: usize,
    pub rules: Vec<RuleReport>,
    pub decomposition: Option<DcReport>,
    pub search_nodes: u64,
    pub seconds: f64,
}

impl RunReport {
    /// Node count after preprocessing as a fraction of the input.
    pub fn node_fraction(&self) -> f64 {
        if self.nodes_before == 0 {
            1.0
        } else {
            self.nodes_after as f64 / self.nodes_before as f64
        }
    }
}

fn status_of(out: &Outcome) -> Status {
    if out.optimal {
        Status::Optimal
    } else {
        Status::Gap {
            lower: out.lower,
            upper: out.upper,
        }
    }
}

fn solve_instance(inst: &Instance, roots: &[NodeId], cfg: &SolverConfig) -> Result<(Solution, u64)> {
    let g = inst.graph();
    let nodes: Vec<NodeId> = g.nodes().collect();
    let c = g.compact(&nodes);
    let local: Vec<usize> = roots
        .iter()
        .map(|r| c.ids.binary_search(r).map_err(|_| Error::UnknownNode(*r)))
        .collect::<Result<_>>()?;
    let out = bnb_drive(&c, Some(&local), cfg)?;
    let chosen: Vec<NodeId> = out.nodes.iter().map(|&i| c.ids[i]).collect();
    let status = status_of(&out);
    let sol = if chosen.is_empty() {
        Solution {
            selected: BTreeSet::new(),
            objective: 0.0,
            status,
        }
    } else {
        inst.solution(&chosen, status)?
    };
    Ok((sol, out.stats.nodes))
}

/// Solves `g` in the configured mode. With `roots` non-empty every mode runs
/// the bare rooted solver, as the reductions assume the unrooted problem.
pub fn run(g: &WeightedGraph, roots: &[NodeId], cfg: &RunConfig) -> Result<(Solution, RunReport)> {
    let start = Instant::now();
    for &r in roots {
        if !g.contains(r) {
            return Err(Error::UnknownNode(r));
        }
    }
    let mut report = RunReport {
        mode: cfg.mode,
        nodes_before: g.node_count(),
        edges_before: g.edge_count(),
        ..Default::default()
    };
    let finish = |mut report: RunReport, g: &WeightedGraph| {
        report.nodes_after = g.node_count();
        report.edges_after = g.edge_count();
        report.components_after = g.components().len();
        report.seconds = start.elapsed().as_secs_f64();
        report
    };
    if g.node_count() == 0 {
        if !roots.is_empty() {
            return Err(Error::Infeasible("empty graph".into()));
        }
        let sol = Solution {
            selected: BTreeSet::new(),
            objective: 0.0,
            status: Status::Optimal,
        };
        return Ok((sol, finish(report, g)));
    }
    let no_positive = g.nodes().all(|v| g.weight(v) <= 0.0);
    if roots.is_empty() && no_positive {
        let sol = if cfg.allow_empty {
            Solution {
                selected: BTreeSet::new(),
                objective: 0.0,
                status: Status::Optimal,
            }
        } else {
            let top = g.max_weight_node().expect("non-empty graph");
            Solution {
                selected: BTreeSet::from([top]),
                objective: g.weight(top),
                status: Status::Optimal,
            }
        };
        return Ok((sol, finish(report, g)));
    }

    let mode = if roots.is_empty() { cfg.mode } else { Mode::NoPre };
    let (sol, report) = match mode {
        Mode::NoPre => {
            let inst = Instance::new(g.clone());
            let (sol, nodes) = solve_instance(&inst, roots, &cfg.solver)?;
            report.search_nodes = nodes;
            (sol, finish(report, g))
        }
        Mode::Pre => {
            let mut inst = Instance::new(g.clone());
            report.rules = preprocess(&mut inst, &cfg.preprocess);
            let (sol, nodes) = solve_instance(&inst, &[], &cfg.solver)?;
            report.search_nodes = nodes;
            (sol, finish(report, inst.graph()))
        }
        Mode::Dc => {
            let mut reduced = Instance::new(g.clone());
            let rules = preprocess(&mut reduced, &cfg.preprocess);
            let dc = DcConfig {
                solver: cfg.solver.clone(),
                preprocess: cfg.preprocess,
            };
            let (sol, dc_report) = solve_mwcs(g, &dc)?;
            report.rules = rules;
            report.decomposition = Some(dc_report);
            (sol, finish(report, reduced.graph()))
        }
    };
    Ok((sol, report))
}

/// Node and edge counts before and after preprocessing alone.
pub fn preprocess_summary(g: &WeightedGraph, cfg: &PreprocessConfig) -> RunReport {
    let start = Instant::now();
    let mut inst = Instance::new(g.clone());
    let rules = preprocess(&mut inst, cfg);
    let r = inst.graph();
    RunReport {
        mode: Mode::Pre,
        nodes_before: g.node_count(),
        edges_before: g.edge_count(),
        nodes_after: r.node_count(),
        edges_after: r.edge_count(),
        components_after: r.components().len(),
        rules,
        seconds: start.elapsed().as_secs_f64(),
        ..Default::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> WeightedGraph {
        WeightedGraph::from_edges(&[5.0, -2.0, 4.0, -9.0, 1.0], &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap()
    }

    #[test]
    fn modes_agree_on_a_path() {
        for mode in Mode::ALL {
            let cfg = RunConfig {
                mode,
                ..Default::default()
            };
            let (sol, report) = run(&path(), &[], &cfg).unwrap();
            assert_eq!(sol.objective, 7.0, "{mode}");
            assert!(sol.is_optimal());
            assert!(report.node_fraction() <= 1.0);
        }
    }

    #[test]
    fn rooted_runs_fall_back_to_the_solver() {
        let cfg = RunConfig::default();
        let (sol, _) = run(&path(), &[NodeId(0), NodeId(4)], &cfg).unwrap();
        assert_eq!(sol.objective, 5.0 - 2.0 + 4.0 - 9.0 + 1.0);
    }

    #[test]
    fn all_negative() {
        let g = WeightedGraph::from_edges(&[-3.0, -1.0], &[(0, 1)]).unwrap();
        let mut cfg = RunConfig::default();
        assert_eq!(run(&g, &[], &cfg).unwrap().0.objective, -1.0);
        cfg.allow_empty = true;
        let (sol, _) = run(&g, &[], &cfg).unwrap();
        assert!(sol.selected.is_empty() && sol.objective == 0.0);
    }

    #[test]
    fn mode_names_round_trip() {
        for m in Mode::ALL {
            assert_eq!(m.name().parse::<Mode>().unwrap(), m);
        }
        assert!("fast".parse::<Mode>().is_err());
    }
}
