//! Gadget for a piece `A` hanging off a separation pair `{u, v}`.
//!
//! The plan is built from the rooted optima `V1` (root `u`, without `v`),
//! `V2` (root `v`, without `u`) and `V3` (roots `u, v`), each with its roots
//! stripped. It is checked against the piece before anything is replaced:
//! every connected part of the gadget must expand to a connected part of
//! `A`, and the best gadget sets for the four ways a solution can touch the
//! pair must be at least as heavy as in `A`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::graph::{NodeId, WeightedGraph};

/// Slot roles; slots 0 and 1 always hold `u` and `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Role {
    U,
    V,
    OnlyV1,
    OnlyV2,
    Shared,
    Bridge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Slot {
    pub role: Role,
    pub members: BTreeSet<NodeId>,
}

/// Which branches of the construction fired.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Branches {
    /// `V1` and `V2` are disjoint and at least one was folded into `u`/`v`.
    pub disjoint: bool,
    /// A node for `V1 & V2` was created.
    pub shared: bool,
    /// A node for `V3 - (V1 | V2)` was created.
    pub bridge: bool,
    /// A closing edge towards the opposite pair node was added.
    pub closure: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GadgetPlan {
    pub slots: Vec<Slot>,
    /// Explicit wiring between slot indices.
    pub edges: BTreeSet<(usize, usize)>,
    pub branches: Branches,
}

impl GadgetPlan {
    pub fn interior_slots(&self) -> usize {
        self.slots.len() - 2
    }

    /// Adjacency between slots: explicit wiring plus every pair of slots
    /// whose member sets are adjacent in `g` (merging keeps neighbours).
    pub fn adjacency(&self, g: &WeightedGraph) -> Vec<Vec<bool>> {
        let k = self.slots.len();
        let mut adj = vec![vec![false; k]; k];
        for &(a, b) in &self.edges {
            adj[a][b] = true;
            adj[b][a] = true;
        }
        for a in 0..k {
            for b in a + 1..k {
                let touching = self.slots[a]
                    .members
                    .iter()
                    .any(|&x| g.neighbors(x).any(|y| self.slots[b].members.contains(&y)));
                if touching {
                    adj[a][b] = true;
                    adj[b][a] = true;
                }
            }
        }
        adj
    }
}

/// Follows the construction step by step. Slots folded into `u` or `v`
/// are dropped and their wiring redirected.
pub fn plan_gadget(
    u: NodeId,
    v: NodeId,
    v1: &BTreeSet<NodeId>,
    v2: &BTreeSet<NodeId>,
    v3: &BTreeSet<NodeId>,
) -> GadgetPlan {
    let only1: BTreeSet<NodeId> = v1.difference(v2).copied().collect();
    let only2: BTreeSet<NodeId> = v2.difference(v1).copied().collect();
    let shared: BTreeSet<NodeId> = v1.intersection(v2).copied().collect();
    let union: BTreeSet<NodeId> = v1.union(v2).copied().collect();
    let bridge: BTreeSet<NodeId> = v3.difference(&union).copied().collect();

    let mut slots = vec![
        Slot {
            role: Role::U,
            members: BTreeSet::from([u]),
        },
        Slot {
            role: Role::V,
            members: BTreeSet::from([v]),
        },
    ];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut branches = Branches::default();
    let mut n1 = None;
    let mut n2 = None;
    if !only1.is_empty() {
        slots.push(Slot {
            role: Role::OnlyV1,
            members: only1.clone(),
        });
        n1 = Some(slots.len() - 1);
        edges.push((0, slots.len() - 1));
    }
    if !only2.is_empty() {
        slots.push(Slot {
            role: Role::OnlyV2,
            members: only2.clone(),
        });
        n2 = Some(slots.len() - 1);
        edges.push((1, slots.len() - 1));
    }
    // slot index -> slot it was folded into
    let mut folded: Vec<Option<usize>> = vec![None; 6];
    if shared.is_empty() {
        if let Some(i) = n1 {
            folded[i] = Some(0);
            branches.disjoint = true;
        }
        if let Some(i) = n2 {
            folded[i] = Some(1);
            branches.disjoint = true;
        }
    } else {
        slots.push(Slot {
            role: Role::Shared,
            members: shared.clone(),
        });
        let n3 = slots.len() - 1;
        branches.shared = true;
        edges.push((n1.unwrap_or(0), n3));
        edges.push((n2.unwrap_or(1), n3));
    }
    if !bridge.is_empty() {
        slots.push(Slot {
            role: Role::Bridge,
            members: bridge.clone(),
        });
        let n4 = slots.len() - 1;
        branches.bridge = true;
        edges.push((0, n4));
        edges.push((1, n4));
    }
    if shared.is_empty() && bridge.is_empty() {
        if let Some(i) = n1 {
            edges.push((i, 1));
            branches.closure = true;
        }
        if let Some(i) = n2 {
            edges.push((i, 0));
            branches.closure = true;
        }
    }

    // apply folds: members move into u or v, wiring follows
    for i in (2..slots.len()).rev() {
        if let Some(target) = folded[i] {
            let moved = std::mem::take(&mut slots[i].members);
            slots[target].members.extend(moved);
        }
    }
    let mut remap = vec![usize::MAX; slots.len()];
    let mut kept = Vec::new();
    for (i, slot) in slots.into_iter().enumerate() {
        match folded.get(i).copied().flatten() {
            Some(_) => {}
            None => {
                remap[i] = kept.len();
                kept.push(slot);
            }
        }
    }
    for i in 0..remap.len() {
        if let Some(t) = folded[i] {
            remap[i] = remap[t];
        }
    }
    let edges = edges
        .into_iter()
        .map(|(a, b)| (remap[a].min(remap[b]), remap[a].max(remap[b])))
        .filter(|(a, b)| a != b)
        .collect();
    GadgetPlan {
        slots: kept,
        edges,
        branches,
    }
}

/// Best values of a region for the ways a solution can meet `{u, v}`:
/// only `u`, only `v`, both joined inside, and both where each part holds
/// `u` or `v` (joined outside).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairProfile {
    pub only_u: f64,
    pub only_v: f64,
    pub joined: f64,
    pub split: f64,
}

impl PairProfile {
    pub fn dominates(&self, other: &PairProfile) -> bool {
        const TOL: f64 = 1e-9;
        self.only_u >= other.only_u - TOL
            && self.only_v >= other.only_v - TOL
            && self.joined >= other.joined - TOL
            && self.split >= other.split - TOL
    }
}

fn mask_components(adj: &[Vec<bool>], mask: u32) -> Vec<u32> {
    let mut left = mask;
    let mut out = Vec::new();
    while left != 0 {
        let start = left.trailing_zeros() as usize;
        let mut comp = 1u32 << start;
        let mut stack = vec![start];
        while let Some(a) = stack.pop() {
            for (b, &e) in adj[a].iter().enumerate() {
                if e && mask >> b & 1 == 1 && comp >> b & 1 == 0 {
                    comp |= 1 << b;
                    stack.push(b);
                }
            }
        }
        left &= !comp;
        out.push(comp);
    }
    out
}

fn members_of(plan: &GadgetPlan, mask: u32) -> BTreeSet<NodeId> {
    (0..plan.slots.len())
        .filter(|&i| mask >> i & 1 == 1)
        .flat_map(|i| plan.slots[i].members.iter().copied())
        .collect()
}

/// Every connected set of slots must expand to a connected node set of `g`.
pub fn plan_is_sound(g: &WeightedGraph, plan: &GadgetPlan) -> bool {
    let adj = plan.adjacency(g);
    let k = plan.slots.len();
    (1u32..1 << k).all(|mask| {
        mask_components(&adj, mask)
            .into_iter()
            .all(|c| g.is_connected_subset(&members_of(plan, c)))
    })
}

/// Profile of the gadget, by enumeration over slot subsets.
pub fn plan_profile(g: &WeightedGraph, plan: &GadgetPlan) -> PairProfile {
    let adj = plan.adjacency(g);
    let k = plan.slots.len();
    let weight: Vec<f64> = plan
        .slots
        .iter()
        .map(|s| s.members.iter().map(|&x| g.weight(x)).sum())
        .collect();
    let mut p = PairProfile {
        only_u: f64::NEG_INFINITY,
        only_v: f64::NEG_INFINITY,
        joined: f64::NEG_INFINITY,
        split: f64::NEG_INFINITY,
    };
    for mask in 1u32..1 << k {
        let w: f64 = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| weight[i]).sum();
        let comps = mask_components(&adj, mask);
        let (has_u, has_v) = (mask & 1 == 1, mask & 2 == 2);
        match (has_u, has_v) {
            (true, false) if comps.len() == 1 => p.only_u = p.only_u.max(w),
            (false, true) if comps.len() == 1 => p.only_v = p.only_v.max(w),
            (true, true) => {
                if comps.len() == 1 {
                    p.joined = p.joined.max(w);
                }
                if comps.iter().all(|&c| c & 3 != 0) {
                    p.split = p.split.max(w);
                }
            }
            _ => {}
        }
    }
    p
}
