//! Brute-force ground truth for small instances.
//!
//! Two independent enumerations are provided: growing connected sets from a
//! minimum seed node, and scanning every subset with a connectivity filter.
//! Both return the maximum-weight connected set containing the roots, breaking
//! ties towards the lexicographically smallest node list.

use crate::error::{Error, Result};
use crate::graph::CompactGraph;

/// Largest instance [`brute_force`] accepts.
pub const ORACLE_LIMIT: usize = 25;
/// Largest instance [`brute_force_subsets`] accepts.
pub const SUBSET_LIMIT: usize = 20;

const TIE_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Optimum {
    /// Selected local indices, sorted.
    pub nodes: Vec<usize>,
    pub weight: f64,
}

struct Best {
    mask: Option<u32>,
    weight: f64,
}

impl Best {
    fn offer(&mut self, mask: u32, weight: f64) {
        let better = match self.mask {
            None => true,
            Some(cur) => {
                weight > self.weight + TIE_EPS
                    || ((weight - self.weight).abs() <= TIE_EPS && lex_less(mask, cur))
            }
        };
        if better {
            self.mask = Some(mask);
            self.weight = weight;
        }
    }
}

/// Compares the sorted index lists of two masks lexicographically.
fn lex_less(a: u32, b: u32) -> bool {
    let (mut a, mut b) = (a, b);
    loop {
        match (a, b) {
            (0, 0) => return false,
            (0, _) => return true,
            (_, 0) => return false,
            _ => {}
        }
        let (x, y) = (a.trailing_zeros(), b.trailing_zeros());
        if x != y {
            return x < y;
        }
        a &= a - 1;
        b &= b - 1;
    }
}

fn mask_weight(g: &CompactGraph, mask: u32) -> f64 {
    let mut m = mask;
    let mut w = 0.0;
    while m != 0 {
        w += g.weights[m.trailing_zeros() as usize];
        m &= m - 1;
    }
    w
}

fn to_nodes(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

fn neighbour_masks(g: &CompactGraph) -> Vec<u32> {
    g.adj
        .iter()
        .map(|nb| nb.iter().fold(0u32, |m, &w| m | 1 << w))
        .collect()
}

fn prepare(g: &CompactGraph, roots: Option<&[usize]>, limit: usize) -> Result<u32> {
    if g.len() > limit {
        return Err(Error::SizeLimit {
            nodes: g.len(),
            limit,
        });
    }
    let root_mask = roots.unwrap_or(&[]).iter().fold(0u32, |m, &r| m | 1 << r);
    if root_mask != 0 {
        let comps = g.components();
        let first = roots.unwrap()[0];
        let comp = comps.iter().find(|c| c.contains(&first)).unwrap();
        if roots.unwrap().iter().any(|r| !comp.contains(r)) {
            return Err(Error::Infeasible("roots lie in different components".into()));
        }
    }
    Ok(root_mask)
}

fn finish(best: Best, allow_empty: bool, rooted: bool) -> Optimum {
    match best.mask {
        Some(mask) if rooted || !allow_empty || best.weight >= 0.0 => Optimum {
            nodes: to_nodes(mask),
            weight: best.weight,
        },
        _ => Optimum {
            nodes: Vec::new(),
            weight: 0.0,
        },
    }
}

/// Exact optimum by enumerating every connected node set grown from its
/// smallest member.
pub fn brute_force(g: &CompactGraph, roots: Option<&[usize]>, allow_empty: bool) -> Result<Optimum> {
    let root_mask = prepare(g, roots, ORACLE_LIMIT)?;
    let nb = neighbour_masks(g);
    let mut best = Best {
        mask: None,
        weight: f64::NEG_INFINITY,
    };
    let n = g.len();
    for v in 0..n {
        let below = (1u32 << v) - 1;
        if root_mask & below != 0 {
            // every feasible set contains the smallest root
            break;
        }
        let start = 1u32 << v;
        grow(g, &nb, start, nb[v] & !below, below, root_mask, &mut best);
    }
    Ok(finish(best, allow_empty, root_mask != 0))
}

fn grow(g: &CompactGraph, nb: &[u32], set: u32, ext: u32, banned: u32, roots: u32, best: &mut Best) {
    if set & roots == roots {
        best.offer(set, mask_weight(g, set));
    }
    let mut ext_left = ext;
    let mut banned = banned;
    while ext_left != 0 {
        let c = ext_left.trailing_zeros() as usize;
        let bit = 1u32 << c;
        ext_left &= !bit;
        let fresh = nb[c] & !(set | ext_left | banned | bit | ext);
        grow(g, nb, set | bit, ext_left | fresh, banned, roots, best);
        banned |= bit;
    }
}

/// Exact optimum by scanning all `2^n` subsets.
pub fn brute_force_subsets(g: &CompactGraph, roots: Option<&[usize]>, allow_empty: bool) -> Result<Optimum> {
    let root_mask = prepare(g, roots, SUBSET_LIMIT)?;
    let nb = neighbour_masks(g);
    let mut best = Best {
        mask: None,
        weight: f64::NEG_INFINITY,
    };
    let n = g.len();
    for mask in 1u32..(1u32 << n) {
        if mask & root_mask != root_mask || !connected(&nb, mask) {
            continue;
        }
        best.offer(mask, mask_weight(g, mask));
    }
    Ok(finish(best, allow_empty, root_mask != 0))
}

fn connected(nb: &[u32], mask: u32) -> bool {
    let mut reached = mask & mask.wrapping_neg();
    loop {
        let mut next = reached;
        let mut m = reached;
        while m != 0 {
            next |= nb[m.trailing_zeros() as usize];
            m &= m - 1;
        }
        next &= mask;
        if next == reached {
            return reached == mask;
        }
        reached = next;
    }
}

/// Visits every connected node set (as a bitmask) of a graph with at most
/// [`ORACLE_LIMIT`] nodes.
pub fn for_each_connected_set(g: &CompactGraph, mut visit: impl FnMut(u32)) -> Result<()> {
    prepare(g, None, ORACLE_LIMIT)?;
    let nb = neighbour_masks(g);
    fn rec(nb: &[u32], set: u32, ext: u32, banned: u32, visit: &mut dyn FnMut(u32)) {
        visit(set);
        let mut ext_left = ext;
        let mut banned = banned;
        while ext_left != 0 {
            let c = ext_left.trailing_zeros() as usize;
            let bit = 1u32 << c;
            ext_left &= !bit;
            let fresh = nb[c] & !(set | ext_left | banned | bit | ext);
            rec(nb, set | bit, ext_left | fresh, banned, visit);
            banned |= bit;
        }
    }
    for v in 0..g.len() {
        let below = (1u32 << v) - 1;
        rec(&nb, 1 << v, nb[v] & !below, below, &mut visit);
    }
    Ok(())
}
