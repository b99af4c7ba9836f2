//! Reduction rules, applied to a fixpoint in three phases of increasing
//! cost. A change in a later phase restarts the first phase.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::time::Instant;

use serde::Serialize;

use crate::graph::{Instance, NodeId, WeightedGraph};

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RuleReport {
    pub rule: String,
    pub applications: usize,
    pub nodes_removed: usize,
    pub nodes_merged: usize,
    pub elapsed: f64,
}

impl RuleReport {
    fn new(rule: &str) -> Self {
        RuleReport {
            rule: rule.to_string(),
            ..Default::default()
        }
    }

    fn changed(&self) -> bool {
        self.applications > 0
    }

    fn absorb(&mut self, other: &RuleReport) {
        self.applications += other.applications;
        self.nodes_removed += other.nodes_removed;
        self.nodes_merged += other.nodes_merged;
        self.elapsed += other.elapsed;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PreprocessConfig {
    pub phase1: bool,
    pub phase2: bool,
    pub phase3: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            phase1: true,
            phase2: true,
            phase3: true,
        }
    }
}

fn timed(rule: &str, f: impl FnOnce(&mut RuleReport)) -> RuleReport {
    let start = Instant::now();
    let mut report = RuleReport::new(rule);
    f(&mut report);
    report.elapsed = start.elapsed().as_secs_f64();
    report
}

/// Removes isolated nodes of strictly negative weight.
pub fn rule_isolated_negative(inst: &mut Instance) -> RuleReport {
    timed("isolated-negative", |r| {
        let g = inst.graph();
        let doomed: Vec<NodeId> = g.nodes().filter(|&v| g.degree(v) == 0 && g.weight(v) < 0.0).collect();
        for v in doomed {
            inst.remove(&[v]).expect("live node");
            r.applications += 1;
            r.nodes_removed += 1;
        }
    })
}

fn components_where(g: &WeightedGraph, keep: impl Fn(NodeId) -> bool) -> Vec<Vec<NodeId>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for s in g.nodes().filter(|&v| keep(v)) {
        if !seen.insert(s) {
            continue;
        }
        let mut comp = vec![s];
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for w in g.neighbors(u) {
                if keep(w) && seen.insert(w) {
                    comp.push(w);
                    stack.push(w);
                }
            }
        }
        comp.sort();
        out.push(comp);
    }
    out
}

/// Contracts every connected group of strictly positive nodes.
pub fn rule_merge_adjacent_positive(inst: &mut Instance) -> RuleReport {
    timed("merge-positive", |r| {
        let g = inst.graph();
        let groups: Vec<Vec<NodeId>> = components_where(g, |v| g.weight(v) > 0.0)
            .into_iter()
            .filter(|c| c.len() > 1)
            .collect();
        for group in groups {
            inst.merge(&group).expect("connected positive group");
            r.applications += 1;
            r.nodes_merged += group.len();
        }
    })
}

/// Contracts every maximal path of at least two negative degree-2 nodes.
/// A cycle made only of such nodes keeps its largest id apart.
pub fn rule_negative_chain(inst: &mut Instance) -> RuleReport {
    timed("negative-chain", |r| {
        let g = inst.graph();
        let chains = components_where(g, |v| g.degree(v) == 2 && g.weight(v) < 0.0);
        let mut todo = Vec::new();
        for mut chain in chains {
            let member: BTreeSet<NodeId> = chain.iter().copied().collect();
            let closed = chain.iter().all(|&v| g.neighbors(v).all(|w| member.contains(&w)));
            if closed {
                chain.pop();
            }
            if chain.len() >= 2 {
                todo.push(chain);
            }
        }
        for chain in todo {
            inst.merge(&chain).expect("chain is a path");
            r.applications += 1;
            r.nodes_merged += chain.len();
        }
    })
}

/// Among negative nonadjacent nodes with identical neighbourhoods only the
/// heaviest survives (the largest id on ties).
pub fn rule_mirrored_hubs(inst: &mut Instance) -> RuleReport {
    timed("mirrored-hubs", |r| {
        let g = inst.graph();
        let mut groups: BTreeMap<Vec<NodeId>, Vec<NodeId>> = BTreeMap::new();
        for v in g.nodes().filter(|&v| g.weight(v) < 0.0 && g.degree(v) > 0) {
            groups.entry(g.neighbors(v).collect()).or_default().push(v);
        }
        let mut doomed = Vec::new();
        for members in groups.into_values().filter(|m| m.len() > 1) {
            let keep = *members
                .iter()
                .max_by(|&&a, &&b| g.weight(a).total_cmp(&g.weight(b)).then(a.cmp(&b)))
                .unwrap();
            doomed.extend(members.into_iter().filter(|&v| v != keep));
        }
        for v in doomed {
            inst.remove(&[v]).expect("live node");
            r.applications += 1;
            r.nodes_removed += 1;
        }
    })
}

struct Entry(f64, NodeId);

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Shortest `from -> to` distance avoiding `skip`, entering node `b` costs
/// `max(-w(b), 0)` except for `to` itself. Stops early once the distance reaches `cap`.
fn distance_avoiding(g: &WeightedGraph, from: NodeId, to: NodeId, skip: NodeId, cap: f64) -> f64 {
    let mut dist: BTreeMap<NodeId, f64> = BTreeMap::new();
    let mut heap = BinaryHeap::new();
    dist.insert(from, 0.0);
    heap.push(Entry(0.0, from));
    while let Some(Entry(d, u)) = heap.pop() {
        if u == to {
            return d;
        }
        if d >= cap {
            break;
        }
        if dist.get(&u).is_some_and(|&best| d > best) {
            continue;
        }
        for w in g.neighbors(u) {
            if w == skip {
                continue;
            }
            let step = if w == to { 0.0 } else { (-g.weight(w)).max(0.0) };
            let nd = d + step;
            if dist.get(&w).is_none_or(|&best| nd < best) {
                dist.insert(w, nd);
                heap.push(Entry(nd, w));
            }
        }
    }
    f64::INFINITY
}

/// Removes a negative degree-2 node `v` when its two neighbours are joined
/// by a path that is strictly cheaper than `-w(v)`.
pub fn rule_least_cost(inst: &mut Instance) -> RuleReport {
    timed("least-cost", |r| {
        let candidates: Vec<NodeId> = {
            let g = inst.graph();
            g.nodes().filter(|&v| g.degree(v) == 2 && g.weight(v) < 0.0).collect()
        };
        for v in candidates {
            let g = inst.graph();
            if !g.contains(v) || g.degree(v) != 2 {
                continue;
            }
            let nb: Vec<NodeId> = g.neighbors(v).collect();
            let limit = -g.weight(v);
            if distance_avoiding(g, nb[0], nb[1], v, limit) < limit {
                inst.remove(&[v]).expect("live node");
                r.applications += 1;
                r.nodes_removed += 1;
            }
        }
    })
}

/// Runs the enabled phases to a global fixpoint and returns one aggregated
/// report per rule, in rule order.
pub fn preprocess(inst: &mut Instance, cfg: &PreprocessConfig) -> Vec<RuleReport> {
    type Rule = fn(&mut Instance) -> RuleReport;
    let phase1: [(&str, Rule); 3] = [
        ("isolated-negative", rule_isolated_negative),
        ("merge-positive", rule_merge_adjacent_positive),
        ("negative-chain", rule_negative_chain),
    ];
    let mut totals: Vec<RuleReport> = ["isolated-negative", "merge-positive", "negative-chain", "mirrored-hubs", "least-cost"]
        .iter()
        .map(|name| RuleReport::new(name))
        .collect();
    loop {
        if cfg.phase1 {
            loop {
                let mut changed = false;
                for (k, (_, rule)) in phase1.iter().enumerate() {
                    let rep = rule(inst);
                    changed |= rep.changed();
                    totals[k].absorb(&rep);
                }
                if !changed {
                    break;
                }
            }
        }
        if cfg.phase2 {
            let rep = rule_mirrored_hubs(inst);
            totals[3].absorb(&rep);
            if rep.changed() {
                continue;
            }
        }
        if cfg.phase3 {
            let rep = rule_least_cost(inst);
            totals[4].absorb(&rep);
            if rep.changed() {
                continue;
            }
        }
        break;
    }
    let enabled = [cfg.phase1, cfg.phase1, cfg.phase1, cfg.phase2, cfg.phase3];
    totals
        .into_iter()
        .zip(enabled)
        .filter(|(_, on)| *on)
        .map(|(r, _)| r)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force;

    fn instance(weights: &[f64], edges: &[(usize, usize)]) -> Instance {
        Instance::new(WeightedGraph::from_edges(weights, edges).unwrap())
    }

    fn optimum(inst: &Instance) -> f64 {
        let g = inst.graph();
        let nodes: Vec<NodeId> = g.nodes().collect();
        let c = g.compact(&nodes);
        let opt = brute_force(&c, None, true).unwrap();
        let reduced: Vec<NodeId> = opt.nodes.iter().map(|&i| c.ids[i]).collect();
        let sol = inst.solution(&reduced, crate::graph::Status::Optimal).unwrap();
        assert!(inst.original().is_connected_subset(&sol.selected));
        sol.objective
    }

    #[test]
    fn isolated_negative_strictness() {
        let mut inst = instance(&[-3.0, 3.0, 0.0], &[]);
        let r = rule_isolated_negative(&mut inst);
        assert_eq!(r.nodes_removed, 1);
        assert_eq!(inst.graph().node_count(), 2);
    }

    #[test]
    fn positive_merge_cascades() {
        let mut inst = instance(&[1.0, 1.0, 1.0], &[(0, 1), (1, 2)]);
        rule_merge_adjacent_positive(&mut inst);
        let g = inst.graph();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.weight(g.nodes().next().unwrap()), 3.0);

        let mut inst = instance(&[2.0, 0.0], &[(0, 1)]);
        assert!(!rule_merge_adjacent_positive(&mut inst).changed());
    }

    #[test]
    fn chain_merge_keeps_optimum() {
        let mut inst = instance(&[5.0, -1.0, -1.0, 5.0], &[(0, 1), (1, 2), (2, 3)]);
        rule_negative_chain(&mut inst);
        assert_eq!(inst.graph().node_count(), 3);
        assert_eq!(optimum(&inst), 8.0);
    }

    #[test]
    fn single_chain_node_untouched() {
        let mut inst = instance(&[5.0, -1.0, 5.0], &[(0, 1), (1, 2)]);
        assert!(!rule_negative_chain(&mut inst).changed());
    }

    #[test]
    fn negative_cycle() {
        let mut inst = instance(&[-1.0; 4], &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        rule_negative_chain(&mut inst);
        let g = inst.graph();
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));
        assert_eq!(optimum(&inst), 0.0);
    }

    #[test]
    fn mirrored_hubs() {
        // u(-5), v(-2) both adjacent to a, b
        let mut inst = instance(&[-5.0, -2.0, 1.0, 1.0], &[(0, 2), (0, 3), (1, 2), (1, 3)]);
        rule_mirrored_hubs(&mut inst);
        assert!(!inst.graph().contains(NodeId(0)));
        assert!(inst.graph().contains(NodeId(1)));

        let mut inst = instance(&[-2.0, -2.0, 1.0, 1.0], &[(0, 2), (0, 3), (1, 2), (1, 3)]);
        rule_mirrored_hubs(&mut inst);
        assert!(!inst.graph().contains(NodeId(0)) && inst.graph().contains(NodeId(1)));

        let mut inst = instance(&[-5.0, 2.0, 1.0, 1.0], &[(0, 2), (0, 3), (1, 2), (1, 3)]);
        assert!(!rule_mirrored_hubs(&mut inst).changed());
    }

    #[test]
    fn least_cost_cases() {
        // v(-5) between u and w, alternative u - a(-1) - w
        let mut inst = instance(&[2.0, -5.0, 2.0, -1.0], &[(0, 1), (1, 2), (0, 3), (3, 2)]);
        let before = optimum(&inst);
        rule_least_cost(&mut inst);
        assert!(!inst.graph().contains(NodeId(1)));
        assert_eq!(optimum(&inst), before);

        // v(-1) with an alternative of cost 3: v stays, the -3 detour goes
        let mut inst = instance(&[2.0, -1.0, 2.0, -3.0], &[(0, 1), (1, 2), (0, 3), (3, 2)]);
        rule_least_cost(&mut inst);
        assert!(inst.graph().contains(NodeId(1)) && !inst.graph().contains(NodeId(3)));

        // equal costs are kept
        let mut inst = instance(&[2.0, -2.0, 2.0, -2.0], &[(0, 1), (1, 2), (0, 3), (3, 2)]);
        assert!(!rule_least_cost(&mut inst).changed());

        // direct edge to a positive neighbour
        let mut inst = instance(&[2.0, -2.0, 1.0], &[(0, 1), (1, 2), (0, 2)]);
        rule_least_cost(&mut inst);
        assert!(!inst.graph().contains(NodeId(1)));
    }

    #[test]
    fn fixpoint_on_path() {
        let mut inst = instance(&[5.0, -1.0, -1.0, 5.0], &[(0, 1), (1, 2), (2, 3)]);
        preprocess(&mut inst, &PreprocessConfig::default());
        assert_eq!(optimum(&inst), 8.0);
        let again = preprocess(&mut inst, &PreprocessConfig::default());
        assert!(again.iter().all(|r| r.applications == 0));
    }
}
