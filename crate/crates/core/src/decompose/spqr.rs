//! Split components of a biconnected block at its separation pairs.
//!
//! Pairs are found by removing each node in turn and looking for cut
//! vertices of the rest, which takes O(|V| (|V| + |E|)).

use std::collections::BTreeSet;

use crate::decompose::blockcut::biconnected_blocks;
use crate::error::{Error, Result};
use crate::graph::{CompactGraph, NodeId, WeightedGraph};

/// A piece `A = K + {u, v}` where `K` is a connected component of the block
/// without the pair. The root piece is the whole block and has no pair.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitComponent {
    pub nodes: Vec<NodeId>,
    pub pair: Option<(NodeId, NodeId)>,
}

impl SplitComponent {
    /// Nodes other than the cut pair.
    pub fn interior(&self) -> Vec<NodeId> {
        match self.pair {
            Some((u, v)) => self.nodes.iter().copied().filter(|&w| w != u && w != v).collect(),
            None => self.nodes.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpqrDecomposition {
    /// Separation pairs `(u, v)` with `u < v`, sorted.
    pub pairs: Vec<(NodeId, NodeId)>,
    /// Root piece first, then the pieces of every pair in pair order.
    pub components: Vec<SplitComponent>,
}

fn cut_vertices(c: &CompactGraph, alive: &[bool]) -> Vec<usize> {
    let keep: Vec<usize> = (0..c.len()).filter(|&v| alive[v]).collect();
    let mut local = vec![usize::MAX; c.len()];
    for (i, &v) in keep.iter().enumerate() {
        local[v] = i;
    }
    let mut edges = Vec::new();
    for &v in &keep {
        for &w in &c.adj[v] {
            if v < w && alive[w] {
                edges.push((local[v], local[w]));
            }
        }
    }
    let sub = CompactGraph::from_edges(vec![0.0; keep.len()], &edges);
    let mut seen = vec![0usize; keep.len()];
    for block in biconnected_blocks(&sub) {
        for v in block {
            seen[v] += 1;
        }
    }
    (0..keep.len()).filter(|&i| seen[i] > 1).map(|i| keep[i]).collect()
}

fn is_biconnected(c: &CompactGraph) -> bool {
    c.len() >= 3 && c.components().len() == 1 && biconnected_blocks(c).len() == 1
}

pub fn spqr_decomposition(g: &WeightedGraph, block: &[NodeId]) -> Result<SpqrDecomposition> {
    let c = g.compact(block);
    if !is_biconnected(&c) {
        return Err(Error::Precondition("separation pairs need a biconnected block with at least 3 nodes".into()));
    }
    let n = c.len();
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut alive = vec![true; n];
    for u in 0..n {
        alive[u] = false;
        for v in cut_vertices(&c, &alive) {
            pairs.insert((u.min(v), u.max(v)));
        }
        alive[u] = true;
    }
    let mut components = vec![SplitComponent {
        nodes: {
            let mut all = c.ids.clone();
            all.sort();
            all
        },
        pair: None,
    }];
    let mut id_pairs = Vec::new();
    for &(u, v) in &pairs {
        let mut member = vec![true; n];
        member[u] = false;
        member[v] = false;
        let (iu, iv) = (c.ids[u].min(c.ids[v]), c.ids[u].max(c.ids[v]));
        id_pairs.push((iu, iv));
        for k in c.components_mask(&member) {
            let mut nodes: Vec<NodeId> = k.into_iter().map(|i| c.ids[i]).collect();
            nodes.push(iu);
            nodes.push(iv);
            nodes.sort();
            components.push(SplitComponent {
                nodes,
                pair: Some((iu, iv)),
            });
        }
    }
    id_pairs.sort();
    let root = components.remove(0);
    components.sort_by(|a, b| a.pair.cmp(&b.pair).then(a.nodes.cmp(&b.nodes)));
    components.insert(0, root);
    Ok(SpqrDecomposition {
        pairs: id_pairs,
        components,
    })
}
