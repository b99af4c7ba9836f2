//! Primal heuristic: spanning tree guided by a fractional point, solved exactly
//! by dynamic programming on the tree.

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::graph::CompactGraph;

/// Fractional values of the node variables `x` and, for the unrooted
/// formulation, the root variables `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct FractionalPoint {
    pub x: Vec<f64>,
    pub y: Option<Vec<f64>>,
}

impl FractionalPoint {
    pub fn ones(n: usize) -> Self {
        FractionalPoint {
            x: vec![1.0; n],
            y: None,
        }
    }

    /// Checks `0 <= y <= x <= 1` and, when `y` is present, `sum(y) = 1`.
    pub fn validate(&self) -> Result<()> {
        const TOL: f64 = 1e-9;
        for (v, &xv) in self.x.iter().enumerate() {
            if !(-TOL..=1.0 + TOL).contains(&xv) {
                return Err(Error::Precondition(format!("x[{v}] = {xv} outside [0, 1]")));
            }
        }
        if let Some(y) = &self.y {
            if y.len() != self.x.len() {
                return Err(Error::Precondition("x and y differ in length".into()));
            }
            for (v, (&yv, &xv)) in y.iter().zip(&self.x).enumerate() {
                if yv < -TOL || yv > xv + TOL {
                    return Err(Error::Precondition(format!("y[{v}] = {yv} violates 0 <= y <= x")));
                }
            }
            let total: f64 = y.iter().sum();
            if (total - 1.0).abs() > 1e-6 {
                return Err(Error::Precondition(format!("y sums to {total}, expected 1")));
            }
        }
        Ok(())
    }
}

/// Values of the tree recurrence and the induced optimal subtree.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeDp {
    /// `values[v]` for nodes in the root's component, `None` elsewhere.
    pub values: Vec<Option<f64>>,
    /// Connected node set containing the root and all required nodes, sorted.
    pub witness: Vec<usize>,
    pub weight: f64,
}

/// Rooted maximum-weight subtree. `M(v)` adds every child value that is
/// positive, and every child value whose subtree holds a required node
/// regardless of sign.
///
/// Only the component containing `root` is processed; it must be acyclic.
pub fn tree_dp(tree: &CompactGraph, root: usize, required: &[usize]) -> Result<TreeDp> {
    let n = tree.len();
    if root >= n {
        return Err(Error::Precondition(format!("root {root} out of range")));
    }
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    seen[root] = true;
    order.push(root);
    let mut half_edges = 0usize;
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        half_edges += tree.adj[u].len();
        for &w in &tree.adj[u] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = u;
                order.push(w);
            }
        }
    }
    if half_edges / 2 != order.len() - 1 {
        return Err(Error::NotATree(format!(
            "component of {root} has {} nodes and {} edges",
            order.len(),
            half_edges / 2
        )));
    }
    let mut forced = vec![false; n];
    for &r in required {
        if r >= n || !seen[r] {
            return Err(Error::Infeasible(format!("required node {r} not reachable from root")));
        }
        forced[r] = true;
    }
    let mut values: Vec<Option<f64>> = vec![None; n];
    let mut acc: Vec<f64> = tree.weights.clone();
    for &v in order.iter().rev() {
        values[v] = Some(acc[v]);
        if v != root {
            let p = parent[v];
            if forced[v] {
                forced[p] = true;
                acc[p] += acc[v];
            } else if acc[v] > 0.0 {
                acc[p] += acc[v];
            }
        }
    }
    let mut witness = vec![root];
    let mut head = 0;
    while head < witness.len() {
        let u = witness[head];
        head += 1;
        for &w in &tree.adj[u] {
            if parent[w] == u && (forced[w] || acc[w] > 0.0) {
                witness.push(w);
            }
        }
    }
    witness.sort_unstable();
    Ok(TreeDp {
        weight: acc[root],
        values,
        witness,
    })
}

/// Minimum spanning forest (Kruskal) under edge costs
/// `2 - (x[u] + x[v])`; ties keep the lexicographic edge order.
pub fn spanning_tree(g: &CompactGraph, point: &FractionalPoint) -> CompactGraph {
    let mut edges: Vec<(f64, usize, usize)> = g
        .edges()
        .into_iter()
        .map(|(u, v)| (2.0 - (point.x[u] + point.x[v]), u, v))
        .collect();
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut uf = UnionFind::<usize>::new(g.len());
    let chosen: Vec<(usize, usize)> = edges
        .into_iter()
        .filter(|&(_, u, v)| uf.union(u, v))
        .map(|(_, u, v)| (u, v))
        .collect();
    let mut tree = CompactGraph::from_edges(g.weights.clone(), &chosen);
    tree.ids = g.ids.clone();
    tree
}

/// A feasible connected solution found by the heuristic.
#[derive(Clone, Debug, PartialEq)]
pub struct HeuristicSolution {
    pub nodes: Vec<usize>,
    pub weight: f64,
}

/// Spanning tree plus tree DP. Unrooted: the tree is rooted at every
/// positive node and the best subtree is kept (the best single node when no
/// weight is positive). Rooted: one pass from the first root. Returns `None`
/// when the roots are not connected in `g`.
pub fn primal_heuristic(
    g: &CompactGraph,
    point: Option<&FractionalPoint>,
    roots: Option<&[usize]>,
) -> Option<HeuristicSolution> {
    if g.is_empty() {
        return None;
    }
    let ones;
    let point = match point {
        Some(p) => p,
        None => {
            ones = FractionalPoint::ones(g.len());
            &ones
        }
    };
    let tree = spanning_tree(g, point);
    match roots {
        Some(r) if !r.is_empty() => {
            let dp = tree_dp(&tree, r[0], r).ok()?;
            Some(HeuristicSolution {
                weight: g.weight_of(&dp.witness),
                nodes: dp.witness,
            })
        }
        _ => {
            let mut best: Option<HeuristicSolution> = None;
            for v in (0..g.len()).filter(|&v| g.weights[v] > 0.0) {
                let dp = tree_dp(&tree, v, &[v]).expect("spanning forest is acyclic");
                if best.as_ref().is_none_or(|b| dp.weight > b.weight) {
                    best = Some(HeuristicSolution {
                        weight: g.weight_of(&dp.witness),
                        nodes: dp.witness,
                    });
                }
            }
            best.or_else(|| {
                let v = (0..g.len()).fold(0, |b, v| if g.weights[v] > g.weights[b] { v } else { b });
                Some(HeuristicSolution {
                    nodes: vec![v],
                    weight: g.weights[v],
                })
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force;

    #[test]
    fn forced_negative_root() {
        let t = CompactGraph::from_edges(vec![-4.0], &[]);
        let dp = tree_dp(&t, 0, &[0]).unwrap();
        assert_eq!(dp.values[0], Some(-4.0));
        assert_eq!(dp.witness, vec![0]);
    }

    #[test]
    fn path_values() {
        // r(+1) - a(-2) - b(+5)
        let t = CompactGraph::from_edges(vec![1.0, -2.0, 5.0], &[(0, 1), (1, 2)]);
        let dp = tree_dp(&t, 0, &[0]).unwrap();
        assert_eq!(dp.values, vec![Some(4.0), Some(3.0), Some(5.0)]);
        assert_eq!(dp.witness, vec![0, 1, 2]);
        assert_eq!(dp.weight, 4.0);
    }

    #[test]
    fn star_clips_negative_children() {
        let t = CompactGraph::from_edges(vec![1.0, -1.0, -2.0], &[(0, 1), (0, 2)]);
        let dp = tree_dp(&t, 0, &[0]).unwrap();
        assert_eq!(dp.values[0], Some(1.0));
        assert_eq!(dp.witness, vec![0]);
    }

    #[test]
    fn deep_required_node_is_reached() {
        // r(+1) - a(-5) - b(-1): b required, so a must be taken too
        let t = CompactGraph::from_edges(vec![1.0, -5.0, -1.0], &[(0, 1), (1, 2)]);
        let dp = tree_dp(&t, 0, &[0, 2]).unwrap();
        assert_eq!(dp.witness, vec![0, 1, 2]);
        assert_eq!(dp.weight, -5.0);
    }

    #[test]
    fn cycle_is_rejected() {
        let t = CompactGraph::from_edges(vec![1.0; 3], &[(0, 1), (1, 2), (0, 2)]);
        assert!(matches!(tree_dp(&t, 0, &[0]), Err(Error::NotATree(_))));
    }

    #[test]
    fn heuristic_exact_on_trees() {
        let t = CompactGraph::from_edges(vec![3.0, -1.0, 2.0, -4.0, 6.0], &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let h = primal_heuristic(&t, None, None).unwrap();
        let opt = brute_force(&t, None, false).unwrap();
        assert_eq!(h.weight, opt.weight);
    }

    #[test]
    fn heuristic_on_cycle() {
        // cycle +3, +3, -10, +3: the three positives are joined without the
        // -10 node, so the optimum is 9
        let g = CompactGraph::from_edges(vec![3.0, 3.0, -10.0, 3.0], &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let opt = brute_force(&g, None, false).unwrap();
        assert_eq!(opt.weight, 9.0);
        let h = primal_heuristic(&g, None, None).unwrap();
        assert!(g.is_connected_set(&h.nodes));
        assert!(h.weight <= opt.weight);
        assert_eq!(h.weight, 9.0);
    }

    #[test]
    fn kruskal_prefers_high_fractional_values() {
        let g = CompactGraph::from_edges(vec![1.0; 3], &[(0, 1), (1, 2), (0, 2)]);
        let p = FractionalPoint {
            x: vec![1.0, 0.1, 1.0],
            y: None,
        };
        let t = spanning_tree(&g, &p);
        assert!(t.adj[0].contains(&2));
        assert_eq!(t.edge_count(), 2);
    }

    #[test]
    fn point_validation() {
        let good = FractionalPoint {
            x: vec![1.0, 0.5],
            y: Some(vec![0.6, 0.4]),
        };
        good.validate().unwrap();
        let bad = FractionalPoint {
            x: vec![1.0, 0.3],
            y: Some(vec![0.6, 0.4]),
        };
        assert!(bad.validate().is_err());
    }
}
