//! Node-weighted undirected graphs, the reduction operations with provenance
//! tracking, and a compact index-based view used by the solvers.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stable identifier of a node. Ids are never reused: supernodes created by
/// [`Instance::merge`] and [`Instance::isolate`] receive fresh ids.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug)]
struct Slot {
    weight: f64,
    adj: BTreeSet<NodeId>,
}

/// Undirected graph with real node weights.
///
/// Adjacency is kept in ordered sets so every traversal is deterministic. The
/// first `labels.len()` ids are the original nodes of the instance; any id
/// beyond that is a supernode produced by a reduction.
#[derive(Clone, Debug, Default)]
pub struct WeightedGraph {
    slots: Vec<Option<Slot>>,
    labels: Vec<String>,
    live: usize,
    edges: usize,
}

impl WeightedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph on nodes `0..weights.len()` labelled `1..=n`.
    pub fn from_edges(weights: &[f64], edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = WeightedGraph::new();
        for (i, &w) in weights.iter().enumerate() {
            g.add_node((i + 1).to_string(), w);
        }
        for &(u, v) in edges {
            g.add_edge(NodeId(u), NodeId(v))?;
        }
        Ok(g)
    }

    /// Adds an original node. Must not be called after a reduction has
    /// allocated supernodes.
    pub fn add_node(&mut self, label: impl Into<String>, weight: f64) -> NodeId {
        assert_eq!(
            self.slots.len(),
            self.labels.len(),
            "original nodes must be added before any supernode"
        );
        let id = NodeId(self.slots.len());
        self.labels.push(label.into());
        self.slots.push(Some(Slot {
            weight,
            adj: BTreeSet::new(),
        }));
        self.live += 1;
        id
    }

    /// Adds the edge `{u, v}`. Returns `false` when it was already present.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<bool> {
        if u == v {
            return Err(Error::Precondition(format!("self-loop on {u}")));
        }
        self.slot(u)?;
        self.slot(v)?;
        let fresh = self.slot_mut(u).adj.insert(v);
        if fresh {
            self.slot_mut(v).adj.insert(u);
            self.edges += 1;
        }
        Ok(fresh)
    }

    pub fn remove_edge(&mut self, u: NodeId, v: NodeId) -> bool {
        if !self.contains(u) || !self.contains(v) {
            return false;
        }
        let had = self.slot_mut(u).adj.remove(&v);
        if had {
            self.slot_mut(v).adj.remove(&u);
            self.edges -= 1;
        }
        had
    }

    fn slot(&self, v: NodeId) -> Result<&Slot> {
        self.slots
            .get(v.0)
            .and_then(Option::as_ref)
            .ok_or(Error::UnknownNode(v))
    }

    fn slot_mut(&mut self, v: NodeId) -> &mut Slot {
        self.slots[v.0].as_mut().expect("live node")
    }

    pub fn contains(&self, v: NodeId) -> bool {
        matches!(self.slots.get(v.0), Some(Some(_)))
    }

    /// Weight of a live node. Panics on unknown ids.
    pub fn weight(&self, v: NodeId) -> f64 {
        self.slots[v.0].as_ref().expect("live node").weight
    }

    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.slots[v.0].as_ref().expect("live node").adj.iter().copied()
    }

    pub fn adjacent(&self, u: NodeId, v: NodeId) -> bool {
        self.slot(u).map(|s| s.adj.contains(&v)).unwrap_or(false)
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.slots[v.0].as_ref().expect("live node").adj.len()
    }

    /// Live nodes in increasing id order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.slots
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_some())
            .map(|(i, _)| NodeId(i))
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes()
            .flat_map(move |u| self.neighbors(u).filter(move |&v| u < v).map(move |v| (u, v)))
    }

    pub fn node_count(&self) -> usize {
        self.live
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// Number of original nodes the graph was built with.
    pub fn original_count(&self) -> usize {
        self.labels.len()
    }

    /// External name of an original node.
    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn max_weight_node(&self) -> Option<NodeId> {
        let mut best: Option<NodeId> = None;
        for v in self.nodes() {
            if best.is_none_or(|b| self.weight(v) > self.weight(b)) {
                best = Some(v);
            }
        }
        best
    }

    /// Sum of weights of `nodes`, accumulated in increasing id order.
    pub fn induced_weight<'a>(&self, nodes: impl IntoIterator<Item = &'a NodeId>) -> f64 {
        let sorted: BTreeSet<NodeId> = nodes.into_iter().copied().collect();
        sorted.iter().map(|&v| self.weight(v)).sum()
    }

    /// Whether `nodes` induces a connected subgraph. The empty set counts as
    /// connected.
    pub fn is_connected_subset(&self, nodes: &BTreeSet<NodeId>) -> bool {
        let Some(&start) = nodes.iter().next() else {
            return true;
        };
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for w in self.neighbors(u) {
                if nodes.contains(&w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen.len() == nodes.len()
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let mut seen = vec![false; self.slots.len()];
        let mut out = Vec::new();
        for s in self.nodes() {
            if seen[s.0] {
                continue;
            }
            seen[s.0] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for w in self.neighbors(u) {
                    if !seen[w.0] {
                        seen[w.0] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Checks adjacency symmetry, loop-freeness and dangling references.
    pub fn validate(&self) -> Result<()> {
        let mut half_edges = 0;
        for u in self.nodes() {
            for v in self.neighbors(u) {
                if u == v {
                    return Err(Error::Precondition(format!("self-loop on {u}")));
                }
                if !self.contains(v) {
                    return Err(Error::Precondition(format!("{u} points to dead node {v}")));
                }
                if !self.adjacent(v, u) {
                    return Err(Error::Precondition(format!("asymmetric edge {u}-{v}")));
                }
                half_edges += 1;
            }
        }
        if half_edges != 2 * self.edges {
            return Err(Error::Precondition("edge counter out of sync".into()));
        }
        if self.nodes().count() != self.live {
            return Err(Error::Precondition("node counter out of sync".into()));
        }
        Ok(())
    }

    /// Compact view of the subgraph induced by `nodes` (kept in the given
    /// order).
    pub fn compact(&self, nodes: &[NodeId]) -> CompactGraph {
        let index: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let adj = nodes
            .iter()
            .map(|&v| self.neighbors(v).filter_map(|w| index.get(&w).copied()).collect())
            .collect();
        CompactGraph {
            weights: nodes.iter().map(|&v| self.weight(v)).collect(),
            adj,
            ids: nodes.to_vec(),
        }
    }

    /// Compact view of the whole graph, nodes in increasing id order.
    pub fn compact_all(&self) -> CompactGraph {
        let nodes: Vec<NodeId> = self.nodes().collect();
        self.compact(&nodes)
    }

    fn alloc(&mut self, weight: f64) -> NodeId {
        let id = NodeId(self.slots.len());
        self.slots.push(Some(Slot {
            weight,
            adj: BTreeSet::new(),
        }));
        self.live += 1;
        id
    }

    fn delete(&mut self, v: NodeId) {
        let slot = self.slots[v.0].take().expect("live node");
        for w in &slot.adj {
            self.slot_mut(*w).adj.remove(&v);
        }
        self.edges -= slot.adj.len();
        self.live -= 1;
    }
}

/// Index-based snapshot of a (sub)graph used by the solvers. `ids[i]` is the
/// graph node behind local index `i`.
#[derive(Clone, Debug, Default)]
pub struct CompactGraph {
    pub weights: Vec<f64>,
    pub adj: Vec<Vec<usize>>,
    pub ids: Vec<NodeId>,
}

impl CompactGraph {
    /// Builds a compact graph directly; `ids` are the local indices.
    pub fn from_edges(weights: Vec<f64>, edges: &[(usize, usize)]) -> Self {
        let n = weights.len();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u != v && !adj[u].contains(&v) {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        CompactGraph {
            weights,
            adj,
            ids: (0..n).map(NodeId).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, nb) in self.adj.iter().enumerate() {
            let mut row: Vec<usize> = nb.iter().copied().filter(|&v| u < v).collect();
            row.sort_unstable();
            out.extend(row.into_iter().map(|v| (u, v)));
        }
        out
    }

    pub fn weight_of(&self, set: &[usize]) -> f64 {
        let mut s = set.to_vec();
        s.sort_unstable();
        s.iter().map(|&v| self.weights[v]).sum()
    }

    /// Connectivity of the subgraph induced by the nodes with `member[v]`.
    pub fn is_connected_mask(&self, member: &[bool]) -> bool {
        let Some(start) = member.iter().position(|&m| m) else {
            return true;
        };
        let total = member.iter().filter(|&&m| m).count();
        let mut seen = vec![false; self.len()];
        seen[start] = true;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if member[w] && !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == total
    }

    pub fn is_connected_set(&self, set: &[usize]) -> bool {
        let mut member = vec![false; self.len()];
        for &v in set {
            member[v] = true;
        }
        self.is_connected_mask(&member)
    }

    /// Connected components of the subgraph induced by `member`, each sorted.
    pub fn components_mask(&self, member: &[bool]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for s in 0..self.len() {
            if !member[s] || seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if member[w] && !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        self.components_mask(&vec![true; self.len()])
    }

    /// Open neighbourhood of `set`: nodes outside adjacent to some member.
    pub fn boundary(&self, set: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.len()];
        for &v in set {
            member[v] = true;
        }
        let mut out: BTreeSet<usize> = BTreeSet::new();
        for &v in set {
            for &w in &self.adj[v] {
                if !member[w] {
                    out.insert(w);
                }
            }
        }
        out.into_iter().collect()
    }
}

/// Kind of a logged reduction step.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Merge,
    Isolate,
    Remove,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceOp {
    pub kind: OpKind,
    pub inputs: Vec<NodeId>,
    pub output: Option<NodeId>,
}

/// Maps every live node back to the original nodes it stands for.
#[derive(Clone, Debug)]
pub struct ReductionTrace {
    origin: HashMap<NodeId, Vec<NodeId>>,
    original_weights: Vec<f64>,
    log: Vec<TraceOp>,
}

impl ReductionTrace {
    pub fn new(g: &WeightedGraph) -> Self {
        let origin = g.nodes().map(|v| (v, vec![v])).collect();
        let original_weights = (0..g.original_count()).map(|i| g.weight(NodeId(i))).collect();
        ReductionTrace {
            origin,
            original_weights,
            log: Vec::new(),
        }
    }

    /// Original nodes behind `v` (sorted). Empty for unknown ids.
    pub fn origin(&self, v: NodeId) -> &[NodeId] {
        self.origin.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn log(&self) -> &[TraceOp] {
        &self.log
    }

    pub fn original_weight(&self, v: NodeId) -> f64 {
        self.original_weights[v.0]
    }

    /// Union of the origins of `reduced`, sorted.
    pub fn expand<'a>(&self, reduced: impl IntoIterator<Item = &'a NodeId>) -> BTreeSet<NodeId> {
        reduced
            .into_iter()
            .flat_map(|v| self.origin(*v).iter().copied())
            .collect()
    }

    fn union(&self, nodes: &[NodeId]) -> Vec<NodeId> {
        let set: BTreeSet<NodeId> = nodes.iter().flat_map(|v| self.origin(*v).iter().copied()).collect();
        set.into_iter().collect()
    }
}

/// Outcome of a solve.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Status {
    Optimal,
    /// Best known solution with proven bounds on the optimum.
    Gap { lower: f64, upper: f64 },
}

/// A node set of the original instance with its objective.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub selected: BTreeSet<NodeId>,
    pub objective: f64,
    pub status: Status,
}

impl Solution {
    pub fn bounds(&self) -> (f64, f64) {
        match self.status {
            Status::Optimal => (self.objective, self.objective),
            Status::Gap { lower, upper } => (lower, upper),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

/// A graph under reduction together with the original instance and the trace
/// connecting the two.
#[derive(Clone, Debug)]
pub struct Instance {
    original: WeightedGraph,
    graph: WeightedGraph,
    trace: ReductionTrace,
}

impl Instance {
    pub fn new(graph: WeightedGraph) -> Self {
        let trace = ReductionTrace::new(&graph);
        Instance {
            original: graph.clone(),
            graph,
            trace,
        }
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn original(&self) -> &WeightedGraph {
        &self.original
    }

    pub fn trace(&self) -> &ReductionTrace {
        &self.trace
    }

    fn check_connected(&self, nodes: &[NodeId]) -> Result<BTreeSet<NodeId>> {
        if nodes.is_empty() {
            return Err(Error::Precondition("empty node set".into()));
        }
        for &v in nodes {
            if !self.graph.contains(v) {
                return Err(Error::UnknownNode(v));
            }
        }
        let set: BTreeSet<NodeId> = nodes.iter().copied().collect();
        if !self.graph.is_connected_subset(&set) {
            return Err(Error::Precondition(format!(
                "node set {:?} does not induce a connected subgraph",
                set.iter().map(|v| v.0).collect::<Vec<_>>()
            )));
        }
        Ok(set)
    }

    /// Contracts a connected node set into one supernode carrying the summed
    /// weight and all outside neighbours.
    pub fn merge(&mut self, nodes: &[NodeId]) -> Result<NodeId> {
        let set = self.check_connected(nodes)?;
        let weight = self.graph.induced_weight(&set);
        let mut outside = BTreeSet::new();
        for &v in &set {
            outside.extend(self.graph.neighbors(v).filter(|w| !set.contains(w)));
        }
        let inputs: Vec<NodeId> = set.iter().copied().collect();
        let origin = self.trace.union(&inputs);
        for &v in &set {
            self.graph.delete(v);
            self.trace.origin.remove(&v);
        }
        let s = self.graph.alloc(weight);
        for w in outside {
            self.graph.add_edge(s, w).expect("live endpoints");
        }
        self.trace.origin.insert(s, origin);
        self.trace.log.push(TraceOp {
            kind: OpKind::Merge,
            inputs,
            output: Some(s),
        });
        Ok(s)
    }

    /// Adds an isolated node standing for a copy of a connected node set; the
    /// set itself is untouched.
    pub fn isolate(&mut self, nodes: &[NodeId]) -> Result<NodeId> {
        let set = self.check_connected(nodes)?;
        let weight = self.graph.induced_weight(&set);
        let inputs: Vec<NodeId> = set.into_iter().collect();
        let origin = self.trace.union(&inputs);
        let s = self.graph.alloc(weight);
        self.trace.origin.insert(s, origin);
        self.trace.log.push(TraceOp {
            kind: OpKind::Isolate,
            inputs,
            output: Some(s),
        });
        Ok(s)
    }

    /// Deletes nodes and their incident edges.
    pub fn remove(&mut self, nodes: &[NodeId]) -> Result<()> {
        for &v in nodes {
            if !self.graph.contains(v) {
                return Err(Error::UnknownNode(v));
            }
        }
        if nodes.is_empty() {
            return Ok(());
        }
        let set: BTreeSet<NodeId> = nodes.iter().copied().collect();
        for &v in &set {
            self.graph.delete(v);
            self.trace.origin.remove(&v);
        }
        self.trace.log.push(TraceOp {
            kind: OpKind::Remove,
            inputs: set.into_iter().collect(),
            output: None,
        });
        Ok(())
    }

    /// Adds an edge between two live nodes (gadget wiring).
    pub fn connect(&mut self, u: NodeId, v: NodeId) -> Result<()> {
        self.graph.add_edge(u, v).map(|_| ())
    }

    /// Original nodes represented by a set of live nodes.
    pub fn expand<'a>(&self, reduced: impl IntoIterator<Item = &'a NodeId>) -> Result<BTreeSet<NodeId>> {
        let reduced: Vec<&NodeId> = reduced.into_iter().collect();
        for v in &reduced {
            if !self.graph.contains(**v) {
                return Err(Error::UnknownNode(**v));
            }
        }
        Ok(self.trace.expand(reduced))
    }

    /// Builds a [`Solution`] in terms of original nodes. The objective is
    /// recomputed from the original weights.
    pub fn solution(&self, reduced: &[NodeId], status: Status) -> Result<Solution> {
        let selected = self.expand(reduced)?;
        let objective = self.original.induced_weight(&selected);
        Ok(Solution {
            selected,
            objective,
            status,
        })
    }

    /// Verifies the trace invariants: weight additivity for every live node
    /// and disjoint origins inside every connected component.
    pub fn validate(&self) -> Result<()> {
        self.graph.validate()?;
        for v in self.graph.nodes() {
            let origin = self.trace.origin(v);
            if origin.is_empty() {
                return Err(Error::Precondition(format!("{v} has no origin")));
            }
            let sum: f64 = origin.iter().map(|&o| self.trace.original_weight(o)).sum();
            if (sum - self.graph.weight(v)).abs() > 1e-9 * (1.0 + sum.abs()) {
                return Err(Error::Precondition(format!(
                    "{v} weighs {} but its origin sums to {sum}",
                    self.graph.weight(v)
                )));
            }
        }
        for comp in self.graph.components() {
            let mut seen = BTreeSet::new();
            for v in comp {
                for &o in self.trace.origin(v) {
                    if !seen.insert(o) {
                        return Err(Error::Precondition(format!("original {o} represented twice")));
                    }
                }
            }
        }
        Ok(())
    }
}
