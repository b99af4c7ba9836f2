//! Node-separator cuts: integral separation by connected components and
//! fractional separation by minimum cuts in the node-split support digraph.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::CompactGraph;
use crate::solver::heuristic::FractionalPoint;

const VIOLATION_TOL: f64 = 1e-6;
const FLOW_EPS: f64 = 1e-12;

/// `x[target] <= sum(x[boundary]) (+ sum(y[set]) when unrooted)`.
/// `root` is the root kept outside `set` in the rooted form.
#[derive(Clone, Debug, PartialEq)]
pub struct CutConstraint {
    pub target: usize,
    pub set: Vec<usize>,
    pub boundary: Vec<usize>,
    pub root: Option<usize>,
}

impl CutConstraint {
    fn new(g: &CompactGraph, target: usize, set: Vec<usize>, root: Option<usize>) -> Self {
        let boundary = g.boundary(&set);
        CutConstraint {
            target,
            set,
            boundary,
            root,
        }
    }

    /// Left-hand side minus right-hand side; positive means violated.
    pub fn violation(&self, x: &[f64], y: Option<&[f64]>) -> f64 {
        let mut rhs: f64 = self.boundary.iter().map(|&u| x[u]).sum();
        if self.root.is_none() {
            if let Some(y) = y {
                rhs += self.set.iter().map(|&u| y[u]).sum::<f64>();
            }
        }
        x[self.target] - rhs
    }
}

/// The root information of an integral point.
#[derive(Clone, Copy, Debug)]
pub enum IntegralRoot<'a> {
    /// Unrooted: the `y` vector, which must select exactly one node.
    Y(&'a [bool]),
    /// Rooted: the fixed root set.
    Set(&'a [usize]),
}

/// One cut per connected component of `G[x]` that misses the root (per root
/// in the rooted case). Empty exactly when the selection is root-connected.
pub fn separate_integral(g: &CompactGraph, x: &[bool], root: IntegralRoot<'_>) -> Result<Vec<CutConstraint>> {
    let comps = g.components_mask(x);
    let mut cuts = Vec::new();
    match root {
        IntegralRoot::Y(y) => {
            let chosen: Vec<usize> = (0..g.len()).filter(|&v| y[v]).collect();
            if chosen.len() != 1 {
                return Err(Error::Precondition(format!(
                    "y selects {} roots, expected exactly one",
                    chosen.len()
                )));
            }
            for c in comps.into_iter().filter(|c| !c.contains(&chosen[0])) {
                cuts.push(CutConstraint::new(g, c[0], c, None));
            }
        }
        IntegralRoot::Set(roots) => {
            for &r in roots {
                for c in comps.iter().filter(|c| !c.contains(&r)) {
                    cuts.push(CutConstraint::new(g, c[0], c.clone(), Some(r)));
                }
            }
        }
    }
    Ok(cuts)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub cap: f64,
}

/// Node-split digraph. Node `v` becomes `in_node[v] -> out_node[v]` with
/// capacity `x[v]`; each edge gives `out -> in` arcs of capacity 1. Unrooted:
/// an artificial `source` feeds `in_node[v]` with capacity `y[v]`. Rooted:
/// roots are not split (`in_node[r] == out_node[r]`).
#[derive(Clone, Debug)]
pub struct SupportDigraph {
    pub node_count: usize,
    pub arcs: Vec<Arc>,
    pub in_node: Vec<usize>,
    pub out_node: Vec<usize>,
    pub source: Option<usize>,
}

pub fn build_support_digraph(g: &CompactGraph, point: &FractionalPoint, roots: Option<&[usize]>) -> SupportDigraph {
    let n = g.len();
    let mut is_root = vec![false; n];
    for &r in roots.unwrap_or(&[]) {
        is_root[r] = true;
    }
    let in_node: Vec<usize> = (0..n).map(|v| 2 * v).collect();
    let out_node: Vec<usize> = (0..n).map(|v| if is_root[v] { 2 * v } else { 2 * v + 1 }).collect();
    let mut arcs = Vec::new();
    let source = match (roots, &point.y) {
        (None, Some(y)) => {
            for v in 0..n {
                arcs.push(Arc {
                    from: 2 * n,
                    to: in_node[v],
                    cap: y[v],
                });
            }
            Some(2 * n)
        }
        _ => None,
    };
    for v in 0..n {
        if !is_root[v] {
            arcs.push(Arc {
                from: in_node[v],
                to: out_node[v],
                cap: point.x[v],
            });
        }
    }
    for (u, v) in g.edges() {
        arcs.push(Arc {
            from: out_node[u],
            to: in_node[v],
            cap: 1.0,
        });
        arcs.push(Arc {
            from: out_node[v],
            to: in_node[u],
            cap: 1.0,
        });
    }
    SupportDigraph {
        node_count: 2 * n + 1,
        arcs,
        in_node,
        out_node,
        source,
    }
}

/// Residual network for Edmonds-Karp max-flow.
struct FlowNetwork {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<f64>,
}

impl FlowNetwork {
    fn new(d: &SupportDigraph) -> Self {
        let mut net = FlowNetwork {
            head: vec![Vec::new(); d.node_count],
            to: Vec::with_capacity(2 * d.arcs.len()),
            cap: Vec::with_capacity(2 * d.arcs.len()),
        };
        for a in &d.arcs {
            net.head[a.from].push(net.to.len());
            net.to.push(a.to);
            net.cap.push(a.cap);
            net.head[a.to].push(net.to.len());
            net.to.push(a.from);
            net.cap.push(0.0);
        }
        net
    }

    /// Maximum flow value; afterwards the residual graph encodes a min cut.
    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        loop {
            let mut pred = vec![usize::MAX; self.head.len()];
            let mut queue = VecDeque::from([s]);
            let mut reached = vec![false; self.head.len()];
            reached[s] = true;
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for &e in &self.head[u] {
                    let w = self.to[e];
                    if !reached[w] && self.cap[e] > FLOW_EPS {
                        reached[w] = true;
                        pred[w] = e;
                        queue.push_back(w);
                    }
                }
            }
            if !reached[t] {
                return total;
            }
            let mut push = f64::INFINITY;
            let mut v = t;
            while v != s {
                let e = pred[v];
                push = push.min(self.cap[e]);
                v = self.to[e ^ 1];
            }
            let mut v = t;
            while v != s {
                let e = pred[v];
                self.cap[e] -= push;
                self.cap[e ^ 1] += push;
                v = self.to[e ^ 1];
            }
            total += push;
        }
    }

    fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &e in &self.head[u] {
                let w = self.to[e];
                if !seen[w] && self.cap[e] > FLOW_EPS {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }
}

/// Minimum-cut separation of the node-separator inequalities at a
/// fractional point. For every target `v` with `x[v] > 0` (and every root
/// in the rooted case) a min cut from the root to `out_node[v]` is computed;
/// when its value is below `x[v]` the set `S` of nodes whose in-copy lies on
/// the sink side is recovered, its boundary recomputed from `g`, and the cut
/// emitted if it is violated by more than 1e-6.
pub fn separate_fractional(
    g: &CompactGraph,
    point: &FractionalPoint,
    roots: Option<&[usize]>,
) -> Result<Vec<CutConstraint>> {
    point.validate()?;
    let roots = roots.filter(|r| !r.is_empty());
    if roots.is_none() && point.y.is_none() {
        return Err(Error::Precondition("unrooted separation needs y values".into()));
    }
    let d = build_support_digraph(g, point, roots);
    let y = point.y.as_deref();
    let sources: Vec<(usize, Option<usize>)> = match roots {
        Some(r) => r.iter().map(|&r| (d.in_node[r], Some(r))).collect(),
        None => vec![(d.source.expect("unrooted digraph has a source"), None)],
    };
    let mut cuts = Vec::new();
    for (s, root) in sources {
        for v in 0..g.len() {
            if point.x[v] <= 0.0 || Some(v) == root {
                continue;
            }
            let mut net = FlowNetwork::new(&d);
            let flow = net.max_flow(s, d.out_node[v]);
            if flow >= point.x[v] - VIOLATION_TOL {
                continue;
            }
            let side = net.source_side(s);
            let set: Vec<usize> = (0..g.len()).filter(|&w| !side[d.in_node[w]]).collect();
            let cut = CutConstraint::new(g, v, set, root);
            if cut.violation(&point.x, y) > VIOLATION_TOL {
                cuts.push(cut);
            }
        }
    }
    Ok(cuts)
}
