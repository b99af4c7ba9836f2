//! Biconnected components of a connected node set (Hopcroft-Tarjan low
//! points, iterative).

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{CompactGraph, NodeId, WeightedGraph};

#[derive(Clone, Debug, PartialEq)]
pub struct BlockCutTree {
    /// Node sets of the blocks, each sorted; bridges are 2-node blocks.
    pub blocks: Vec<Vec<NodeId>>,
    /// Cut vertices, sorted.
    pub cut_vertices: Vec<NodeId>,
    /// Cut vertices of every block, i.e. its neighbours in the tree.
    pub block_cuts: Vec<Vec<NodeId>>,
}

impl BlockCutTree {
    pub fn degree(&self, block: usize) -> usize {
        self.block_cuts[block].len()
    }

    /// Blocks of degree 0 or 1, in block order.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&b| self.degree(b) <= 1).collect()
    }
}

/// Blocks of a compact graph as lists of local indices. Isolated nodes form
/// singleton blocks.
pub fn biconnected_blocks(g: &CompactGraph) -> Vec<Vec<usize>> {
    let n = g.len();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut time = 0;
    let mut blocks = Vec::new();
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        if g.adj[root].is_empty() {
            disc[root] = time;
            time += 1;
            blocks.push(vec![root]);
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        // (node, parent, next neighbour position)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        while let Some(top) = stack.last_mut() {
            let (u, parent, pos) = *top;
            if pos < g.adj[u].len() {
                top.2 += 1;
                let w = g.adj[u][pos];
                if disc[w] == usize::MAX {
                    edge_stack.push((u, w));
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, u, 0));
                } else if w != parent && disc[w] < disc[u] {
                    edge_stack.push((u, w));
                    low[u] = low[u].min(disc[w]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[u]);
                    if low[u] >= disc[parent] {
                        let mut nodes = BTreeSet::new();
                        while let Some(e) = edge_stack.pop() {
                            nodes.insert(e.0);
                            nodes.insert(e.1);
                            if e == (parent, u) {
                                break;
                            }
                        }
                        blocks.push(nodes.into_iter().collect());
                    }
                }
            }
        }
    }
    blocks
}

/// Block-cut tree of a connected node set of `g`.
pub fn block_cut_tree(g: &WeightedGraph, component: &[NodeId]) -> Result<BlockCutTree> {
    let c = g.compact(component);
    if c.components().len() > 1 {
        return Err(Error::Precondition("block_cut_tree needs a connected node set".into()));
    }
    let mut blocks: Vec<Vec<NodeId>> = biconnected_blocks(&c)
        .into_iter()
        .map(|b| {
            let mut ids: Vec<NodeId> = b.into_iter().map(|i| c.ids[i]).collect();
            ids.sort();
            ids
        })
        .collect();
    blocks.sort();
    let mut count: BTreeMap<NodeId, usize> = BTreeMap::new();
    for b in &blocks {
        for &v in b {
            *count.entry(v).or_default() += 1;
        }
    }
    let cut_vertices: Vec<NodeId> = count.iter().filter(|(_, &k)| k > 1).map(|(&v, _)| v).collect();
    let cuts: BTreeSet<NodeId> = cut_vertices.iter().copied().collect();
    let block_cuts = blocks
        .iter()
        .map(|b| b.iter().copied().filter(|v| cuts.contains(v)).collect())
        .collect();
    Ok(BlockCutTree {
        blocks,
        cut_vertices,
        block_cuts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(weights: usize, edges: &[(usize, usize)]) -> BlockCutTree {
        let g = WeightedGraph::from_edges(&vec![1.0; weights], edges).unwrap();
        let all: Vec<NodeId> = g.nodes().collect();
        block_cut_tree(&g, &all).unwrap()
    }

    #[test]
    fn triangle_with_pendant() {
        let t = tree(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        assert_eq!(t.blocks.len(), 2);
        assert_eq!(t.cut_vertices, vec![NodeId(2)]);
    }

    #[test]
    fn tree_edges_are_blocks() {
        let t = tree(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]);
        assert_eq!(t.blocks.len(), 4);
        assert_eq!(t.cut_vertices, vec![NodeId(1), NodeId(3)]);
        assert_eq!(t.leaves().len(), 3);
    }

    #[test]
    fn biconnected_graph() {
        let t = tree(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        assert_eq!(t.blocks.len(), 1);
        assert!(t.cut_vertices.is_empty());
        assert_eq!(t.degree(0), 0);
    }

    #[test]
    fn disconnected_input() {
        let g = WeightedGraph::from_edges(&[1.0; 3], &[(0, 1)]).unwrap();
        let all: Vec<NodeId> = g.nodes().collect();
        assert!(block_cut_tree(&g, &all).is_err());
    }
}
