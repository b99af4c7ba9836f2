//! Reductions between prize-collecting Steiner tree and MWCS.

use std::collections::BTreeSet;

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::graph::{NodeId, WeightedGraph};

/// Undirected graph on nodes `0..profits.len()` with nonnegative node profits
/// and nonnegative edge costs. Edge `k` is `edges[k] = (u, v, cost)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PcstInstance {
    pub profits: Vec<f64>,
    pub edges: Vec<(usize, usize, f64)>,
}

impl PcstInstance {
    pub fn new(profits: Vec<f64>, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if let Some(p) = profits.iter().find(|p| !(**p >= 0.0)) {
            return Err(Error::Precondition(format!("negative profit {p}")));
        }
        for &(u, v, c) in &edges {
            if u >= profits.len() || v >= profits.len() {
                return Err(Error::Precondition(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::Precondition(format!("self-loop on {u}")));
            }
            if !(c >= 0.0) {
                return Err(Error::Precondition(format!("negative cost {c}")));
            }
        }
        Ok(PcstInstance { profits, edges })
    }

    pub fn node_count(&self) -> usize {
        self.profits.len()
    }
}

/// Split vertex introduced for every PCST edge: `split[k]` subdivides edge `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitMap {
    pub split: Vec<NodeId>,
    pub original_nodes: usize,
}

impl SplitMap {
    /// Edge index behind a split vertex.
    pub fn edge_of(&self, v: NodeId) -> Option<usize> {
        v.0.checked_sub(self.original_nodes)
            .filter(|&k| k < self.split.len() && self.split[k] == v)
    }
}

/// A PCST solution: nodes, tree edges (indices into the instance) and profit.
#[derive(Clone, Debug, PartialEq)]
pub struct PcstTree {
    pub nodes: Vec<usize>,
    pub edges: Vec<usize>,
    pub profit: f64,
}

/// Subdivides every edge by a split vertex weighted with the negated edge cost.
/// Original node `v` keeps id `v`; the split vertex of edge `k` gets id `n + k`.
pub fn pcst_to_mwcs(inst: &PcstInstance) -> (WeightedGraph, SplitMap) {
    let n = inst.node_count();
    let mut g = WeightedGraph::new();
    for (v, &p) in inst.profits.iter().enumerate() {
        g.add_node((v + 1).to_string(), p);
    }
    let mut split = Vec::with_capacity(inst.edges.len());
    for (k, &(_, _, c)) in inst.edges.iter().enumerate() {
        split.push(g.add_node(format!("e{}", k + 1), -c));
    }
    for (k, &(u, v, _)) in inst.edges.iter().enumerate() {
        g.add_edge(NodeId(u), split[k]).expect("valid edge");
        g.add_edge(split[k], NodeId(v)).expect("valid edge");
    }
    (
        g,
        SplitMap {
            split,
            original_nodes: n,
        },
    )
}

/// Maps a connected node set of the transformed graph back to a PCST tree.
/// Split vertices become edges; if those close cycles, a spanning tree using
/// the smallest edge indices is kept.
pub fn mwcs_solution_to_pcst(selected: &BTreeSet<NodeId>, map: &SplitMap, inst: &PcstInstance) -> Result<PcstTree> {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for &v in selected {
        if v.0 < map.original_nodes {
            nodes.push(v.0);
        } else if let Some(k) = map.edge_of(v) {
            edges.push(k);
        } else {
            return Err(Error::UnknownNode(v));
        }
    }
    for &k in &edges {
        let (u, v, _) = inst.edges[k];
        if !selected.contains(&NodeId(u)) || !selected.contains(&NodeId(v)) {
            return Err(Error::Precondition(format!(
                "split vertex of edge ({}, {}) selected without both endpoints",
                u + 1,
                v + 1
            )));
        }
    }
    edges.sort_unstable();
    let mut uf = UnionFind::<usize>::new(inst.node_count());
    let tree: Vec<usize> = edges
        .into_iter()
        .filter(|&k| {
            let (u, v, _) = inst.edges[k];
            uf.union(u, v)
        })
        .collect();
    let profit = tree_profit(inst, &nodes, &tree);
    Ok(PcstTree {
        nodes,
        edges: tree,
        profit,
    })
}

fn tree_profit(inst: &PcstInstance, nodes: &[usize], edges: &[usize]) -> f64 {
    let p: f64 = nodes.iter().map(|&v| inst.profits[v]).sum();
    let c: f64 = edges.iter().map(|&k| inst.edges[k].2).sum();
    p - c
}

/// MWCS to PCST: with `shift = min(0, min weight)`, profits are
/// `w(v) - shift` and every edge costs `-shift`, so a tree `T` maps back to a
/// connected set of weight `p(T) + shift`. Returns the instance and `shift`.
pub fn mwcs_to_pcst(g: &WeightedGraph) -> (PcstInstance, Vec<NodeId>, f64) {
    let nodes: Vec<NodeId> = g.nodes().collect();
    let shift = nodes.iter().map(|&v| g.weight(v)).fold(0.0, f64::min);
    let index = |v: NodeId| nodes.binary_search(&v).expect("live node");
    let profits = nodes.iter().map(|&v| g.weight(v) - shift).collect();
    let edges = g.edges().map(|(u, v)| (index(u), index(v), -shift)).collect();
    (PcstInstance { profits, edges }, nodes, shift)
}

/// Largest edge count [`brute_force_pcst`] accepts.
pub const PCST_EDGE_LIMIT: usize = 20;

/// Exact PCST optimum by enumerating every tree of the instance (edge subsets
/// that are acyclic and connected) plus single nodes.
pub fn brute_force_pcst(inst: &PcstInstance) -> Result<PcstTree> {
    let m = inst.edges.len();
    if m > PCST_EDGE_LIMIT {
        return Err(Error::SizeLimit {
            nodes: m,
            limit: PCST_EDGE_LIMIT,
        });
    }
    let mut best: Option<PcstTree> = None;
    let mut offer = |t: PcstTree| {
        if best.as_ref().is_none_or(|b| t.profit > b.profit + 1e-12) {
            best = Some(t);
        }
    };
    for v in 0..inst.node_count() {
        offer(PcstTree {
            nodes: vec![v],
            edges: vec![],
            profit: inst.profits[v],
        });
    }
    for mask in 1u32..(1u32 << m) {
        let edges: Vec<usize> = (0..m).filter(|k| mask >> k & 1 == 1).collect();
        let mut uf = UnionFind::<usize>::new(inst.node_count());
        let mut touched = BTreeSet::new();
        let mut acyclic = true;
        for &k in &edges {
            let (u, v, _) = inst.edges[k];
            touched.insert(u);
            touched.insert(v);
            if !uf.union(u, v) {
                acyclic = false;
                break;
            }
        }
        if !acyclic || touched.len() != edges.len() + 1 {
            continue;
        }
        let nodes: Vec<usize> = touched.into_iter().collect();
        let profit = tree_profit(inst, &nodes, &edges);
        offer(PcstTree { nodes, edges, profit });
    }
    best.ok_or_else(|| Error::Infeasible("empty PCST instance".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force;

    fn single_edge() -> PcstInstance {
        PcstInstance::new(vec![3.0, 2.0], vec![(0, 1, 1.0)]).unwrap()
    }

    #[test]
    fn split_single_edge() {
        let (g, map) = pcst_to_mwcs(&single_edge());
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        let s = map.split[0];
        assert_eq!(g.weight(s), -1.0);
        assert_eq!(g.weight(NodeId(0)), 3.0);
        assert_eq!(g.weight(NodeId(1)), 2.0);
        assert!(g.adjacent(NodeId(0), s) && g.adjacent(s, NodeId(1)));
        assert!(!g.adjacent(NodeId(0), NodeId(1)));
    }

    #[test]
    fn edgeless_and_triangle_counts() {
        let inst = PcstInstance::new(vec![1.0, 2.0], vec![]).unwrap();
        let (g, map) = pcst_to_mwcs(&inst);
        assert_eq!((g.node_count(), g.edge_count(), map.split.len()), (2, 0, 0));
        let tri = PcstInstance::new(vec![1.0; 3], vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let (g, _) = pcst_to_mwcs(&tri);
        assert_eq!((g.node_count(), g.edge_count()), (6, 6));
    }

    #[test]
    fn single_edge_maps_back() {
        let inst = single_edge();
        let (g, map) = pcst_to_mwcs(&inst);
        let opt = brute_force(&g.compact_all(), None, false).unwrap();
        assert_eq!(opt.weight, 4.0);
        let sel: BTreeSet<NodeId> = opt.nodes.iter().map(|&i| NodeId(i)).collect();
        let tree = mwcs_solution_to_pcst(&sel, &map, &inst).unwrap();
        assert_eq!(tree.nodes, vec![0, 1]);
        assert_eq!(tree.edges, vec![0]);
        assert_eq!(tree.profit, 4.0);

        let only_a = BTreeSet::from([NodeId(0)]);
        let tree = mwcs_solution_to_pcst(&only_a, &map, &inst).unwrap();
        assert_eq!((tree.nodes, tree.edges, tree.profit), (vec![0], vec![], 3.0));
    }

    #[test]
    fn path_with_central_profit() {
        let inst = PcstInstance::new(vec![0.0, 5.0, 0.0], vec![(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let (g, map) = pcst_to_mwcs(&inst);
        let opt = brute_force(&g.compact_all(), None, false).unwrap();
        assert_eq!(opt.nodes, vec![1]);
        let sel: BTreeSet<NodeId> = opt.nodes.iter().map(|&i| NodeId(i)).collect();
        assert_eq!(mwcs_solution_to_pcst(&sel, &map, &inst).unwrap().profit, 5.0);
    }

    #[test]
    fn dangling_split_vertex_is_rejected() {
        let inst = single_edge();
        let (_, map) = pcst_to_mwcs(&inst);
        let sel = BTreeSet::from([NodeId(0), map.split[0]]);
        assert!(matches!(mwcs_solution_to_pcst(&sel, &map, &inst), Err(Error::Precondition(_))));
    }

    #[test]
    fn zero_cost_cycle_is_broken() {
        let inst = PcstInstance::new(vec![1.0; 3], vec![(0, 1, 0.0), (1, 2, 0.0), (0, 2, 0.0)]).unwrap();
        let (g, map) = pcst_to_mwcs(&inst);
        let all: BTreeSet<NodeId> = g.nodes().collect();
        let tree = mwcs_solution_to_pcst(&all, &map, &inst).unwrap();
        assert_eq!(tree.edges, vec![0, 1]);
        assert_eq!(tree.profit, 3.0);
    }

    #[test]
    fn invalid_instances() {
        assert!(PcstInstance::new(vec![-1.0], vec![]).is_err());
        assert!(PcstInstance::new(vec![1.0, 1.0], vec![(0, 1, -2.0)]).is_err());
        assert!(PcstInstance::new(vec![1.0], vec![(0, 0, 1.0)]).is_err());
    }

    #[test]
    fn mwcs_to_pcst_single_positive_node() {
        let g = WeightedGraph::from_edges(&[4.0], &[]).unwrap();
        let (inst, _, shift) = mwcs_to_pcst(&g);
        assert_eq!(shift, 0.0);
        let t = brute_force_pcst(&inst).unwrap();
        assert_eq!((t.nodes, t.profit), (vec![0], 4.0));
    }

    #[test]
    fn mwcs_to_pcst_round_trip() {
        use crate::generate::erdos_renyi;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 10 {
            let g = erdos_renyi(&mut rng, 6, 0.4, -10.0, 10.0);
            if g.edge_count() > PCST_EDGE_LIMIT {
                continue;
            }
            let (inst, _, shift) = mwcs_to_pcst(&g);
            let tree = brute_force_pcst(&inst).unwrap();
            let opt = brute_force(&g.compact_all(), None, false).unwrap();
            assert!((tree.profit + shift - opt.weight).abs() < 1e-9);
            checked += 1;
        }
    }
}
