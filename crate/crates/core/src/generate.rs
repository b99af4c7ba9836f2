//! Seeded random instance generators used by the test suites, the benchmark
//! corpus and the `generate` CLI subcommand.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{CompactGraph, NodeId, WeightedGraph};
use crate::transforms::PcstInstance;

/// Uniform weight in `[lo, hi)`, rounded to two decimals so instances survive
/// a text round trip unchanged.
pub fn uniform_weight<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let w = rng.random_range(lo..hi);
    (w * 100.0).round() / 100.0
}

/// Weight that is positive with probability `positive` (in `(0, hi]`) and
/// negative otherwise (in `[lo, 0)`).
pub fn signed_weight<R: Rng>(rng: &mut R, positive: f64, lo: f64, hi: f64) -> f64 {
    if rng.random_bool(positive) {
        let w = uniform_weight(rng, 0.0, hi);
        if w <= 0.0 {
            0.01
        } else {
            w
        }
    } else {
        let w = uniform_weight(rng, lo, 0.0);
        if w >= 0.0 {
            -0.01
        } else {
            w
        }
    }
}

fn build(weights: &[f64], edges: &[(usize, usize)]) -> WeightedGraph {
    WeightedGraph::from_edges(weights, edges).expect("generated edges are valid")
}

/// Erdős–Rényi graph `G(n, p)` with uniform weights in `[lo, hi)`.
pub fn erdos_renyi<R: Rng>(rng: &mut R, n: usize, p: f64, lo: f64, hi: f64) -> WeightedGraph {
    let weights: Vec<f64> = (0..n).map(|_| uniform_weight(rng, lo, hi)).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    build(&weights, &edges)
}

/// Compact Erdős–Rényi graph, convenient for solver-level tests.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64, lo: f64, hi: f64) -> CompactGraph {
    erdos_renyi(rng, n, p, lo, hi).compact_all()
}

/// Uniformly random labelled tree (random attachment) with weights in `[lo, hi)`.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> CompactGraph {
    let weights: Vec<f64> = (0..n).map(|_| uniform_weight(rng, lo, hi)).collect();
    let edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
    CompactGraph::from_edges(weights, &edges)
}

/// Random 2-connected edge set on `k >= 3` local nodes: a shuffled cycle plus
/// chords.
fn biconnected_edges<R: Rng>(rng: &mut R, nodes: &[usize], chord_p: f64) -> Vec<(usize, usize)> {
    let mut order = nodes.to_vec();
    order.shuffle(rng);
    let k = order.len();
    let mut edges: Vec<(usize, usize)> = (0..k).map(|i| (order[i], order[(i + 1) % k])).collect();
    for i in 0..k {
        for j in i + 2..k {
            if (i, j) != (0, k - 1) && rng.random_bool(chord_p) {
                edges.push((order[i], order[j]));
            }
        }
    }
    edges
}

/// Blocks glued at cut vertices: each new block (a bridge or a cycle with
/// chords) shares exactly one node with the graph built so far.
pub fn multi_block<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> WeightedGraph {
    let weights: Vec<f64> = (0..n).map(|_| uniform_weight(rng, lo, hi)).collect();
    let mut edges = Vec::new();
    let mut placed = 1usize;
    while placed < n {
        let size = rng.random_range(1..=5).min(n - placed);
        let anchor = rng.random_range(0..placed);
        let mut nodes = vec![anchor];
        nodes.extend(placed..placed + size);
        if nodes.len() == 2 {
            edges.push((nodes[0], nodes[1]));
        } else {
            edges.extend(biconnected_edges(rng, &nodes, 0.3));
        }
        placed += size;
    }
    build(&weights, &edges)
}

/// Sparse random graph with `m` distinct edges; a node is positive with
/// probability `positive`.
pub fn sparse<R: Rng>(rng: &mut R, n: usize, m: usize, positive: f64, lo: f64, hi: f64) -> WeightedGraph {
    let weights: Vec<f64> = (0..n).map(|_| signed_weight(rng, positive, lo, hi)).collect();
    let mut g = build(&weights, &[]);
    let max_edges = n * n.saturating_sub(1) / 2;
    while g.edge_count() < m.min(max_edges) {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v {
            g.add_edge(NodeId(u), NodeId(v)).expect("valid");
        }
    }
    g
}

/// Random graph whose edges are partly subdivided by chains of one to three
/// negative degree-2 nodes.
pub fn negative_chains<R: Rng>(rng: &mut R, core: usize, lo: f64, hi: f64) -> WeightedGraph {
    let mut weights: Vec<f64> = (0..core).map(|_| uniform_weight(rng, lo, hi)).collect();
    let mut edges = Vec::new();
    for u in 0..core {
        for v in u + 1..core {
            if !rng.random_bool(0.35) {
                continue;
            }
            if rng.random_bool(0.5) {
                let len = rng.random_range(1..=3);
                let mut prev = u;
                for _ in 0..len {
                    let x = weights.len();
                    weights.push(uniform_weight(rng, lo, -0.01));
                    edges.push((prev, x));
                    prev = x;
                }
                edges.push((prev, v));
            } else {
                edges.push((u, v));
            }
        }
    }
    build(&weights, &edges)
}

/// Random graph plus pairs of negative nodes sharing the same neighbourhood.
pub fn twin_hubs<R: Rng>(rng: &mut R, core: usize, pairs: usize, lo: f64, hi: f64) -> WeightedGraph {
    let mut weights: Vec<f64> = (0..core).map(|_| uniform_weight(rng, lo, hi)).collect();
    let mut edges = Vec::new();
    for u in 0..core {
        for v in u + 1..core {
            if rng.random_bool(0.3) {
                edges.push((u, v));
            }
        }
    }
    for _ in 0..pairs {
        let k = rng.random_range(1..=core.min(3));
        let mut hubs: Vec<usize> = (0..core).collect();
        hubs.shuffle(rng);
        hubs.truncate(k);
        let a = weights.len();
        let tie = rng.random_bool(0.3);
        let wa = uniform_weight(rng, lo, -0.01);
        let wb = if tie { wa } else { uniform_weight(rng, lo, -0.01) };
        weights.push(wa);
        weights.push(wb);
        for &h in &hubs {
            edges.push((a, h));
            edges.push((a + 1, h));
        }
    }
    build(&weights, &edges)
}

/// Cycles with chords where many nodes are negative with degree two, the
/// setting the least-cost test targets.
pub fn degree_two_negatives<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> WeightedGraph {
    let weights: Vec<f64> = (0..n)
        .map(|i| if i % 3 == 0 { uniform_weight(rng, lo, hi) } else { uniform_weight(rng, lo, -0.01) })
        .collect();
    let nodes: Vec<usize> = (0..n).collect();
    let mut edges = biconnected_edges(rng, &nodes, 0.08);
    // a few shortcuts between the kept nodes
    for u in (0..n).step_by(3) {
        for v in (u + 3..n).step_by(3) {
            if rng.random_bool(0.25) {
                edges.push((u, v));
            }
        }
    }
    build(&weights, &edges)
}

/// A host graph with a dangling block: a random connected core and a
/// biconnected block attached at a single cut vertex. Returns the graph, the
/// block's nodes and the cut vertex.
pub fn host_with_leaf_block<R: Rng>(
    rng: &mut R,
    core: usize,
    block: usize,
    lo: f64,
    hi: f64,
) -> (WeightedGraph, Vec<NodeId>, NodeId) {
    let n = core + block - 1;
    let weights: Vec<f64> = (0..n).map(|_| uniform_weight(rng, lo, hi)).collect();
    let mut edges = connected_edges(rng, &(0..core).collect::<Vec<_>>(), 0.3);
    let cut = rng.random_range(0..core);
    let mut bnodes = vec![cut];
    bnodes.extend(core..n);
    if bnodes.len() == 2 {
        edges.push((bnodes[0], bnodes[1]));
    } else {
        edges.extend(biconnected_edges(rng, &bnodes, 0.35));
    }
    let g = build(&weights, &edges);
    (g, bnodes.into_iter().map(NodeId).collect(), NodeId(cut))
}

/// A host graph with a component hanging off a separation pair `{u, v}`:
/// returns the graph, the node set `A` (interior plus the pair) and the pair.
/// The interior is connected and attaches to both `u` and `v`.
pub fn host_with_pair_component<R: Rng>(
    rng: &mut R,
    core: usize,
    interior: usize,
    lo: f64,
    hi: f64,
) -> (WeightedGraph, Vec<NodeId>, NodeId, NodeId) {
    let n = core + interior;
    let mut weights: Vec<f64> = (0..n).map(|_| uniform_weight(rng, lo, hi)).collect();
    let inner: Vec<usize> = (core..n).collect();
    if !inner.iter().any(|&i| weights[i] > 0.0) {
        let pick = inner[rng.random_range(0..inner.len())];
        weights[pick] = uniform_weight(rng, 0.5, hi.max(1.0));
    }
    let mut edges = connected_edges(rng, &(0..core).collect::<Vec<_>>(), 0.4);
    let u = 0;
    let v = 1;
    edges.extend(connected_edges(rng, &inner, 0.4));
    for (anchor, forced) in [(u, true), (v, true)] {
        let mut any = false;
        for &x in &inner {
            if rng.random_bool(0.4) {
                edges.push((anchor, x));
                any = true;
            }
        }
        if forced && !any {
            edges.push((anchor, inner[rng.random_range(0..inner.len())]));
        }
    }
    let g = build(&weights, &edges);
    let mut a: Vec<NodeId> = vec![NodeId(u), NodeId(v)];
    a.extend(inner.into_iter().map(NodeId));
    (g, a, NodeId(u), NodeId(v))
}

/// Like [`host_with_pair_component`], but the interior is two clusters, one
/// next to `u` and one next to `v`, joined only through a single negative
/// node, and `u`, `v` are not adjacent. Needs `core >= 3`. Joined solutions then often need a node that neither one-sided
/// optimum uses.
pub fn host_with_split_piece<R: Rng>(
    rng: &mut R,
    core: usize,
    left: usize,
    right: usize,
    lo: f64,
    hi: f64,
) -> (WeightedGraph, Vec<NodeId>, NodeId, NodeId) {
    let n = core + left + right + 1;
    let mut weights: Vec<f64> = (0..n).map(|_| uniform_weight(rng, lo, hi)).collect();
    let middle = n - 1;
    weights[middle] = uniform_weight(rng, lo, -0.01);
    let (u, v) = (0, 1);
    let lside: Vec<usize> = (core..core + left).collect();
    let rside: Vec<usize> = (core + left..core + left + right).collect();
    // no direct u-v edge; the core still joins them through node 2
    let mut edges: Vec<(usize, usize)> = connected_edges(rng, &(0..core).collect::<Vec<_>>(), 0.4)
        .into_iter()
        .filter(|&(a, b)| (a.min(b), a.max(b)) != (u, v))
        .collect();
    edges.extend([(u, 2), (2, v)]);
    for (side, anchor) in [(&lside, u), (&rside, v)] {
        edges.extend(connected_edges(rng, side, 0.4));
        edges.push((anchor, side[rng.random_range(0..side.len())]));
        edges.push((middle, side[rng.random_range(0..side.len())]));
    }
    let g = build(&weights, &edges);
    let mut a: Vec<NodeId> = vec![NodeId(u), NodeId(v)];
    a.extend((core..n).map(NodeId));
    (g, a, NodeId(u), NodeId(v))
}

/// Random connected edge set on `nodes` (random spanning tree plus extra
/// edges with probability `p`).
fn connected_edges<R: Rng>(rng: &mut R, nodes: &[usize], p: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 1..nodes.len() {
        edges.push((nodes[rng.random_range(0..i)], nodes[i]));
    }
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if rng.random_bool(p) {
                edges.push((nodes[i], nodes[j]));
            }
        }
    }
    edges
}

/// Random PCST instance with `n` nodes and `m` edges (fewer if the graph is
/// too small); profits in `[0, 10)` and costs in `[0, 6)`.
pub fn random_pcst<R: Rng>(rng: &mut R, n: usize, m: usize) -> PcstInstance {
    let profits: Vec<f64> = (0..n).map(|_| uniform_weight(rng, 0.0, 10.0)).collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            pairs.push((u, v));
        }
    }
    pairs.shuffle(rng);
    pairs.truncate(m);
    pairs.sort_unstable();
    let edges = pairs
        .into_iter()
        .map(|(u, v)| (u, v, uniform_weight(rng, 0.0, 6.0)))
        .collect();
    PcstInstance::new(profits, edges).expect("generated instance is valid")
}
