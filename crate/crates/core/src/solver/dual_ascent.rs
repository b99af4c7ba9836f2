//! Dual ascent on the directed rooted view of a subproblem.
//!
//! The fixed-in component holding the first fixed node becomes the root.
//! An arc `u -> v` costs what entering `v` costs (`-w(v)` for free negative
//! nodes, zero otherwise). Every free positive node `p` gets a terminal
//! `t_p`, reached either through `p` at no cost or straight from the root
//! at cost `w(p)` (the prize given up). Fixed-in nodes outside the root
//! component are terminals without such a bypass. A connected set then has
//! weight `w_in + prizes - cost` of its cheapest arborescence, and the dual
//! ascent value bounds that cost from below.

use std::cmp::Ordering;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::CompactGraph;

const ZERO: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Ascent {
    /// Lower bound on the arborescence cost.
    pub lower: f64,
    /// Summed weight of the reachable free positive nodes.
    pub prizes: f64,
    /// Per node, `lower` plus the cheapest reduced cost of routing through
    /// it (root to node, node to a terminal). Infinite for fixed or
    /// unreachable nodes.
    pub through: Vec<f64>,
    /// Nodes reachable from the root over arcs of zero reduced cost.
    pub zero_reach: Vec<bool>,
}

struct Digraph {
    from: Vec<usize>,
    to: Vec<usize>,
    cost: Vec<f64>,
    ins: Vec<Vec<usize>>,
    outs: Vec<Vec<usize>>,
}

impl Digraph {
    fn new(vertices: usize) -> Self {
        Digraph {
            from: Vec::new(),
            to: Vec::new(),
            cost: Vec::new(),
            ins: vec![Vec::new(); vertices],
            outs: vec![Vec::new(); vertices],
        }
    }

    fn arc(&mut self, u: usize, v: usize, c: f64) {
        let a = self.from.len();
        self.from.push(u);
        self.to.push(v);
        self.cost.push(c);
        self.outs[u].push(a);
        self.ins[v].push(a);
    }
}

struct Entry(f64, usize);

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

fn dijkstra(d: &Digraph, red: &[f64], sources: &[usize], forward: bool) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; d.ins.len()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0.0;
        heap.push(Entry(0.0, s));
    }
    while let Some(Entry(du, u)) = heap.pop() {
        if du > dist[u] {
            continue;
        }
        let arcs = if forward { &d.outs[u] } else { &d.ins[u] };
        for &a in arcs {
            let w = if forward { d.to[a] } else { d.from[a] };
            let nd = du + red[a];
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Entry(nd, w));
            }
        }
    }
    dist
}

/// Runs dual ascent for the subproblem given by `inside` (fixed in) and
/// `excluded` (fixed out). `None` when a fixed-in node cannot be joined to
/// the root component.
pub fn dual_ascent(g: &CompactGraph, inside: &[bool], excluded: &[bool]) -> Option<Ascent> {
    let n = g.len();
    let first = (0..n).find(|&v| inside[v])?;
    // root component
    let mut in_root = vec![false; n];
    in_root[first] = true;
    let mut stack = vec![first];
    while let Some(u) = stack.pop() {
        for &w in &g.adj[u] {
            if inside[w] && !in_root[w] {
                in_root[w] = true;
                stack.push(w);
            }
        }
    }
    // vertex 0 is the root, graph node v maps to v + 1, terminals follow
    let vid = |v: usize| if in_root[v] { 0 } else { v + 1 };
    let positives: Vec<usize> = (0..n)
        .filter(|&v| !inside[v] && !excluded[v] && g.weights[v] > 0.0)
        .collect();
    let vertices = n + 1 + positives.len();
    let mut d = Digraph::new(vertices);
    for u in 0..n {
        if excluded[u] {
            continue;
        }
        for &v in &g.adj[u] {
            if excluded[v] || in_root[v] || (in_root[u] && in_root[v]) {
                continue;
            }
            let c = if inside[v] { 0.0 } else { (-g.weights[v]).max(0.0) };
            d.arc(vid(u), vid(v), c);
        }
    }
    let mut terminals: Vec<usize> = (0..n).filter(|&v| inside[v] && !in_root[v]).map(|v| v + 1).collect();
    for (k, &p) in positives.iter().enumerate() {
        let t = n + 1 + k;
        d.arc(p + 1, t, 0.0);
        d.arc(0, t, g.weights[p]);
        terminals.push(t);
    }

    // positives cut off from the root only ever pay their bypass; drop them
    let reach = dijkstra(&d, &d.cost, &[0], true);
    if terminals.iter().any(|&t| t <= n && !reach[t].is_finite()) {
        return None;
    }
    let mut prizes = 0.0;
    let mut lower = 0.0;
    let mut red = d.cost.clone();
    for (k, &p) in positives.iter().enumerate() {
        if !reach[p + 1].is_finite() {
            // settle the bypass at once: the terminal has no other way in
            let t = n + 1 + k;
            for &a in &d.ins[t] {
                red[a] = f64::INFINITY;
            }
            continue;
        }
        prizes += g.weights[p];
    }
    terminals.retain(|&t| t <= n || reach[positives[t - n - 1] + 1].is_finite());

    let mut stamp = vec![0u32; vertices];
    let mut round = 0u32;
    // terminals with the smallest cut first
    let mut queue: BinaryHeap<Reverse<(usize, usize)>> = terminals.iter().map(|&t| Reverse((1, t))).collect();
    let mut members = Vec::new();
    while let Some(Reverse((_, t))) = queue.pop() {
        round += 1;
        members.clear();
        members.push(t);
        stamp[t] = round;
        let mut i = 0;
        let mut rooted = false;
        while i < members.len() {
            let v = members[i];
            i += 1;
            for &a in &d.ins[v] {
                let u = d.from[a];
                if red[a] <= ZERO && stamp[u] != round {
                    if u == 0 {
                        rooted = true;
                        break;
                    }
                    stamp[u] = round;
                    members.push(u);
                }
            }
            if rooted {
                break;
            }
        }
        if rooted {
            continue;
        }
        let mut delta = f64::INFINITY;
        for &v in &members {
            for &a in &d.ins[v] {
                if stamp[d.from[a]] != round {
                    delta = delta.min(red[a]);
                }
            }
        }
        if !delta.is_finite() {
            return None;
        }
        lower += delta;
        for &v in &members {
            for &a in &d.ins[v] {
                if stamp[d.from[a]] != round {
                    red[a] -= delta;
                    if red[a] <= ZERO {
                        red[a] = 0.0;
                    }
                }
            }
        }
        queue.push(Reverse((members.len(), t)));
    }

    let from_root = dijkstra(&d, &red, &[0], true);
    let to_terminal = dijkstra(&d, &red, &terminals, false);
    let through = (0..n)
        .map(|v| {
            if inside[v] || excluded[v] {
                f64::INFINITY
            } else {
                lower + from_root[v + 1] + to_terminal[v + 1]
            }
        })
        .collect();
    let zero = dijkstra(&d, &red.iter().map(|&r| if r <= ZERO { 0.0 } else { 1.0 }).collect::<Vec<_>>(), &[0], true);
    let zero_reach = (0..n).map(|v| in_root[v] || zero[v + 1] == 0.0).collect();
    Some(Ascent {
        lower,
        prizes,
        through,
        zero_reach,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::random_graph;
    use crate::oracle::brute_force;
    use rand::SeedableRng;

    #[test]
    fn path_bound_is_tight() {
        // root +5, then -2, then +4: cost side is 2
        let g = CompactGraph::from_edges(vec![5.0, -2.0, 4.0], &[(0, 1), (1, 2)]);
        let a = dual_ascent(&g, &[true, false, false], &[false; 3]).unwrap();
        assert_eq!(a.prizes, 4.0);
        assert_eq!(a.lower, 2.0);
    }

    #[test]
    fn unreachable_fixed_node() {
        let g = CompactGraph::from_edges(vec![1.0, -1.0, 1.0], &[(0, 1), (1, 2)]);
        assert!(dual_ascent(&g, &[true, false, true], &[false, true, false]).is_none());
    }

    #[test]
    fn bound_and_fixing_are_valid() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for trial in 0..300 {
            let g = random_graph(&mut rng, 4 + trial % 11, 0.35, -10.0, 10.0);
            let n = g.len();
            let root = trial % n;
            let mut inside = vec![false; n];
            inside[root] = true;
            let Some(a) = dual_ascent(&g, &inside, &vec![false; n]) else {
                continue;
            };
            let opt = brute_force(&g, Some(&[root]), false).unwrap();
            let bound = g.weights[root] + a.prizes - a.lower;
            assert!(opt.weight <= bound + 1e-9, "trial {trial}: {} > {bound}", opt.weight);
            // every nonzero node of the optimum routes within its value
            let w = g.weight_of(&opt.nodes);
            for &v in opt.nodes.iter().filter(|&&v| v != root && g.weights[v] != 0.0) {
                let via = g.weights[root] + a.prizes - a.through[v];
                assert!(w <= via + 1e-9, "trial {trial} node {v}");
            }
        }
    }
}
