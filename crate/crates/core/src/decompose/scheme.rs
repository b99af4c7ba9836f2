//! Divide and conquer over connected components, blocks and separation
//! pairs. Every step shrinks the set of non-isolated nodes; once all nodes
//! are isolated the heaviest one is the answer.

use std::collections::{BTreeSet, HashSet};
use std::time::Instant;

use serde::Serialize;

use crate::decompose::blockcut::block_cut_tree;
use crate::decompose::gadget::{plan_gadget, plan_is_sound, plan_profile, GadgetPlan, PairProfile};
use crate::decompose::spqr::spqr_decomposition;
use crate::error::{Error, Result};
use crate::graph::{Instance, NodeId, Solution, Status, WeightedGraph};
use crate::preprocess::{preprocess, PreprocessConfig, RuleReport};
use crate::solver::{bnb_drive, SolverConfig};

#[derive(Clone, Debug, Default)]
pub struct DcConfig {
    pub solver: SolverConfig,
    pub preprocess: PreprocessConfig,
}

/// How often each branch of the pair gadget was built, and what became of
/// the built gadgets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GadgetCoverage {
    pub disjoint: usize,
    pub shared: usize,
    pub bridge: usize,
    pub closure: usize,
    pub built: usize,
    pub accepted: usize,
    pub unsound: usize,
    pub weaker: usize,
    pub no_shrink: usize,
}

impl GadgetCoverage {
    fn count(&mut self, plan: &GadgetPlan) {
        let b = plan.branches;
        self.built += 1;
        self.disjoint += b.disjoint as usize;
        self.shared += b.shared as usize;
        self.bridge += b.bridge as usize;
        self.closure += b.closure as usize;
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DcReport {
    pub components: usize,
    pub blocks_processed: usize,
    pub leaf_blocks_removed: usize,
    pub positive_tricomponents: usize,
    pub negative_tricomponents: usize,
    pub coverage: GadgetCoverage,
    pub rules: Vec<RuleReport>,
    /// Set when the budget ran out before every node was isolated.
    pub aborted: bool,
}

impl DcReport {
    fn add_rules(&mut self, reports: Vec<RuleReport>) {
        if self.rules.is_empty() {
            self.rules = reports;
            return;
        }
        for (total, r) in self.rules.iter_mut().zip(reports) {
            total.applications += r.applications;
            total.nodes_removed += r.nodes_removed;
            total.nodes_merged += r.nodes_merged;
            total.elapsed += r.elapsed;
        }
    }
}

/// Mutable state shared by the processing steps.
#[derive(Debug, Default)]
pub struct DcContext {
    pub solver: SolverConfig,
    pub report: DcReport,
    skip: HashSet<(NodeId, NodeId, Vec<NodeId>)>,
}

impl DcContext {
    pub fn new(solver: SolverConfig) -> Self {
        DcContext {
            solver,
            ..Default::default()
        }
    }
}

/// Optimal node set of `g[nodes]` containing `roots`, with an optional extra
/// edge. `None` when the budget ran out first.
fn sub_solve(
    g: &WeightedGraph,
    nodes: &[NodeId],
    roots: &[NodeId],
    extra: Option<(NodeId, NodeId)>,
    cfg: &SolverConfig,
) -> Result<Option<(BTreeSet<NodeId>, f64)>> {
    let mut c = g.compact(nodes);
    let local = |x: NodeId| c.ids.iter().position(|&y| y == x).expect("node in sub-instance");
    let r: Vec<usize> = roots.iter().map(|&x| local(x)).collect();
    if let Some((a, b)) = extra {
        let (a, b) = (local(a), local(b));
        if !c.adj[a].contains(&b) {
            c.adj[a].push(b);
            c.adj[b].push(a);
        }
    }
    let out = bnb_drive(&c, Some(&r), cfg)?;
    if !out.optimal {
        return Ok(None);
    }
    Ok(Some((out.nodes.iter().map(|&i| c.ids[i]).collect(), out.objective)))
}

/// Outcome of one processing step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    /// The graph changed; structures must be recomputed.
    Progress,
    /// The budget ran out; nothing was changed.
    Aborted,
}

/// Replaces a piece with nonpositive interior by the cheapest `u`-`v` path
/// through it (lexicographically smallest among equal costs).
pub fn replace_negative_tricomponent(inst: &mut Instance, piece: &[NodeId], u: NodeId, v: NodeId) -> Result<()> {
    let g = inst.graph();
    let inside: BTreeSet<NodeId> = piece.iter().copied().collect();
    let cost = |b: NodeId| if b == v { 0.0 } else { -g.weight(b) };
    let mut best: Vec<Option<(f64, Vec<NodeId>)>> = vec![None; 0];
    let order: Vec<NodeId> = inside.iter().copied().collect();
    let idx = |x: NodeId| order.binary_search(&x).expect("piece node");
    best.resize(order.len(), None);
    let mut done = vec![false; order.len()];
    best[idx(u)] = Some((0.0, vec![u]));
    loop {
        let next = (0..order.len())
            .filter(|&i| !done[i] && best[i].is_some())
            .min_by(|&a, &b| {
                let (da, pa) = best[a].as_ref().unwrap();
                let (db, pb) = best[b].as_ref().unwrap();
                da.total_cmp(db).then_with(|| pa.cmp(pb))
            });
        let Some(i) = next else {
            break;
        };
        done[i] = true;
        if order[i] == v {
            break;
        }
        let (d, path) = best[i].clone().unwrap();
        for w in g.neighbors(order[i]).filter(|w| inside.contains(w)) {
            if w == u {
                continue;
            }
            let j = idx(w);
            let mut cand = path.clone();
            cand.push(w);
            let nd = d + cost(w);
            let better = match &best[j] {
                None => true,
                Some((bd, bp)) => nd < *bd || (nd == *bd && cand < *bp),
            };
            if !done[j] && better {
                best[j] = Some((nd, cand));
            }
        }
    }
    let (_, path) = best[idx(v)]
        .clone()
        .ok_or_else(|| Error::Precondition("pair nodes are not joined inside the piece".into()))?;
    let keep: BTreeSet<NodeId> = path.iter().copied().collect();
    let middle: Vec<NodeId> = path[1..path.len() - 1].to_vec();
    let drop: Vec<NodeId> = inside.iter().copied().filter(|x| !keep.contains(x)).collect();
    inst.remove(&drop)?;
    if !middle.is_empty() {
        inst.merge(&middle)?;
    }
    Ok(())
}

/// Best value and witness of the four ways a solution meets `{u, v}` inside
/// `piece`.
fn piece_profile(
    g: &WeightedGraph,
    piece: &[NodeId],
    u: NodeId,
    v: NodeId,
    cfg: &SolverConfig,
) -> Result<Option<(PairProfile, [BTreeSet<NodeId>; 3])>> {
    let without_v: Vec<NodeId> = piece.iter().copied().filter(|&x| x != v).collect();
    let without_u: Vec<NodeId> = piece.iter().copied().filter(|&x| x != u).collect();
    let Some((s1, w1)) = sub_solve(g, &without_v, &[u], None, cfg)? else {
        return Ok(None);
    };
    let Some((s2, w2)) = sub_solve(g, &without_u, &[v], None, cfg)? else {
        return Ok(None);
    };
    let Some((s3, w3)) = sub_solve(g, piece, &[u, v], None, cfg)? else {
        return Ok(None);
    };
    let Some((_, w4)) = sub_solve(g, piece, &[u, v], Some((u, v)), cfg)? else {
        return Ok(None);
    };
    let profile = PairProfile {
        only_u: w1,
        only_v: w2,
        joined: w3,
        split: w4,
    };
    Ok(Some((profile, [s1, s2, s3])))
}

/// Outcome of [`process_tricomponent`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriOutcome {
    Replaced,
    /// The gadget failed validation or would not shrink the piece.
    Rejected,
    Aborted,
}

/// Builds the pair gadget for a piece with a positive interior and replaces
/// the piece when the gadget is valid and smaller.
pub fn process_tricomponent(
    inst: &mut Instance,
    piece: &[NodeId],
    u: NodeId,
    v: NodeId,
    ctx: &mut DcContext,
) -> Result<TriOutcome> {
    let g = inst.graph();
    let Some((profile, [s1, s2, s3])) = piece_profile(g, piece, u, v, &ctx.solver)? else {
        return Ok(TriOutcome::Aborted);
    };
    let Some((v4, _)) = sub_solve(g, piece, &[], None, &ctx.solver)? else {
        return Ok(TriOutcome::Aborted);
    };
    let strip = |s: BTreeSet<NodeId>| -> BTreeSet<NodeId> { s.into_iter().filter(|&x| x != u && x != v).collect() };
    let (v1, v2, v3) = (strip(s1), strip(s2), strip(s3));
    let plan = plan_gadget(u, v, &v1, &v2, &v3);
    let cov = &mut ctx.report.coverage;
    cov.count(&plan);
    if plan.interior_slots() + 2 >= piece.len() {
        cov.no_shrink += 1;
        return Ok(TriOutcome::Rejected);
    }
    if !plan_is_sound(g, &plan) {
        cov.unsound += 1;
        return Ok(TriOutcome::Rejected);
    }
    if !plan_profile(g, &plan).dominates(&profile) {
        cov.weaker += 1;
        return Ok(TriOutcome::Rejected);
    }
    cov.accepted += 1;

    let v4: Vec<NodeId> = v4.into_iter().collect();
    inst.isolate(&v4)?;
    let used: BTreeSet<NodeId> = plan.slots.iter().flat_map(|s| s.members.iter().copied()).collect();
    let drop: Vec<NodeId> = piece.iter().copied().filter(|x| !used.contains(x)).collect();
    inst.remove(&drop)?;
    let mut ids = Vec::with_capacity(plan.slots.len());
    for slot in &plan.slots {
        let members: Vec<NodeId> = slot.members.iter().copied().collect();
        ids.push(if members.len() == 1 { members[0] } else { inst.merge(&members)? });
    }
    for &(a, b) in &plan.edges {
        inst.connect(ids[a], ids[b])?;
    }
    Ok(TriOutcome::Replaced)
}

/// One step on a leaf block: drop it when nothing positive lies beyond the
/// cut node, otherwise shrink one separation-pair piece, otherwise replace
/// the whole block by its rooted optimum (plus an isolated copy of the
/// unrooted optimum when that differs).
pub fn process_bicomponent(
    inst: &mut Instance,
    block: &[NodeId],
    cut: Option<NodeId>,
    ctx: &mut DcContext,
) -> Result<Step> {
    let g = inst.graph();
    let beyond: Vec<NodeId> = block.iter().copied().filter(|&x| Some(x) != cut).collect();
    if beyond.iter().all(|&x| g.weight(x) <= 0.0) {
        inst.remove(&beyond)?;
        ctx.report.leaf_blocks_removed += 1;
        return Ok(Step::Progress);
    }
    if block.len() >= 4 {
        let spqr = spqr_decomposition(g, block)?;
        let mut pieces: Vec<_> = spqr
            .components
            .into_iter()
            .filter_map(|c| {
                let (u, v) = c.pair?;
                let interior = c.interior();
                let keep = interior.len() >= 2
                    && cut.is_none_or(|x| !c.nodes.contains(&x))
                    && !ctx.skip.contains(&(u, v, interior.clone()));
                keep.then_some((interior, c.nodes, u, v))
            })
            .collect();
        pieces.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.1.cmp(&b.1)));
        for (interior, nodes, u, v) in pieces {
            if interior.iter().all(|&x| inst.graph().weight(x) <= 0.0) {
                replace_negative_tricomponent(inst, &nodes, u, v)?;
                ctx.report.negative_tricomponents += 1;
                return Ok(Step::Progress);
            }
            match process_tricomponent(inst, &nodes, u, v, ctx)? {
                TriOutcome::Replaced => {
                    ctx.report.positive_tricomponents += 1;
                    return Ok(Step::Progress);
                }
                TriOutcome::Rejected => {
                    ctx.skip.insert((u, v, interior));
                }
                TriOutcome::Aborted => return Ok(Step::Aborted),
            }
        }
    }
    if !replace_leaf_block(inst, block, cut, &ctx.solver)? {
        return Ok(Step::Aborted);
    }
    ctx.report.blocks_processed += 1;
    Ok(Step::Progress)
}

/// Replaces a leaf block by its optimum rooted at the cut node, merged into
/// one node, plus an isolated copy of its unrooted optimum when that
/// differs. Without a cut node the block is a whole component and shrinks
/// to its optimum. Returns `false`, leaving `inst` untouched, when the
/// budget ran out.
pub fn replace_leaf_block(inst: &mut Instance, block: &[NodeId], cut: Option<NodeId>, cfg: &SolverConfig) -> Result<bool> {
    let g = inst.graph();
    let Some((best, _)) = sub_solve(g, block, &[], None, cfg)? else {
        return Ok(false);
    };
    let rooted = match cut {
        Some(c) => match sub_solve(g, block, &[c], None, cfg)? {
            Some((s, _)) => s,
            None => return Ok(false),
        },
        None => best.clone(),
    };
    if best != rooted {
        inst.isolate(&best.iter().copied().collect::<Vec<_>>())?;
    }
    let drop: Vec<NodeId> = block.iter().copied().filter(|x| !rooted.contains(x)).collect();
    inst.remove(&drop)?;
    inst.merge(&rooted.iter().copied().collect::<Vec<_>>())?;
    Ok(true)
}

/// Runs the scheme on `inst` until every node is isolated or the budget runs
/// out. Callers must ensure some weight is positive.
pub fn decompose_instance(inst: &mut Instance, cfg: &DcConfig, ctx: &mut DcContext) -> Result<()> {
    let mut first = true;
    loop {
        if cfg.solver.deadline.is_some_and(|d| Instant::now() >= d) {
            ctx.report.aborted = true;
            return Ok(());
        }
        let reports = preprocess(inst, &cfg.preprocess);
        ctx.report.add_rules(reports);
        let g = inst.graph();
        let comps = g.components();
        if first {
            ctx.report.components = comps.len();
            first = false;
        }
        let Some(comp) = comps.into_iter().find(|c| c.len() > 1) else {
            return Ok(());
        };
        let tree = block_cut_tree(g, &comp)?;
        let leaf = tree.leaves()[0];
        let block = tree.blocks[leaf].clone();
        let cut = tree.block_cuts[leaf].first().copied();
        if process_bicomponent(inst, &block, cut, ctx)? == Step::Aborted {
            ctx.report.aborted = true;
            return Ok(());
        }
    }
}

/// Full pipeline for the unrooted problem. Graphs without a positive weight
/// are answered directly by their heaviest node.
pub fn solve_mwcs(g: &WeightedGraph, cfg: &DcConfig) -> Result<(Solution, DcReport)> {
    let mut inst = Instance::new(g.clone());
    let Some(top) = g.max_weight_node() else {
        return Ok((
            Solution {
                selected: BTreeSet::new(),
                objective: 0.0,
                status: Status::Optimal,
            },
            DcReport::default(),
        ));
    };
    if g.weight(top) <= 0.0 {
        let sol = inst.solution(&[top], Status::Optimal)?;
        return Ok((sol, DcReport::default()));
    }
    let mut ctx = DcContext::new(cfg.solver.clone());
    decompose_instance(&mut inst, cfg, &mut ctx)?;
    let reduced = inst.graph();
    let sol = if ctx.report.aborted {
        let nodes: Vec<NodeId> = reduced.nodes().collect();
        let c = reduced.compact(&nodes);
        let out = bnb_drive(&c, None, &cfg.solver)?;
        let chosen: Vec<NodeId> = out.nodes.iter().map(|&i| c.ids[i]).collect();
        let status = if out.optimal {
            Status::Optimal
        } else {
            Status::Gap {
                lower: out.lower,
                upper: out.upper,
            }
        };
        inst.solution(&chosen, status)?
    } else {
        let best = reduced.max_weight_node().expect("a positive node survives");
        inst.solution(&[best], Status::Optimal)?
    };
    Ok((sol, ctx.report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force;

    fn oracle(g: &WeightedGraph) -> f64 {
        let nodes: Vec<NodeId> = g.nodes().collect();
        brute_force(&g.compact(&nodes), None, false).unwrap().weight
    }

    #[test]
    fn isolated_nodes() {
        let g = WeightedGraph::from_edges(&[5.0, 2.0, -1.0], &[]).unwrap();
        let (sol, _) = solve_mwcs(&g, &DcConfig::default()).unwrap();
        assert_eq!(sol.objective, 5.0);
    }

    #[test]
    fn all_negative_picks_heaviest() {
        let g = WeightedGraph::from_edges(&[-5.0, -2.0, -4.0], &[(0, 1), (1, 2)]).unwrap();
        let (sol, _) = solve_mwcs(&g, &DcConfig::default()).unwrap();
        assert_eq!(sol.selected, BTreeSet::from([NodeId(1)]));
    }

    #[test]
    fn negative_piece_keeps_cheapest_path() {
        // u(1) and v(1) joined by -1,-1 and by -3, plus a positive detour
        let g = WeightedGraph::from_edges(
            &[1.0, 1.0, -1.0, -1.0, -3.0],
            &[(0, 2), (2, 3), (3, 1), (0, 4), (4, 1)],
        )
        .unwrap();
        let mut inst = Instance::new(g);
        let piece: Vec<NodeId> = (0..5).map(NodeId).collect();
        replace_negative_tricomponent(&mut inst, &piece, NodeId(0), NodeId(1)).unwrap();
        let g = inst.graph();
        assert!(!g.contains(NodeId(4)));
        assert_eq!(g.node_count(), 3);
        assert!(g.nodes().any(|x| g.weight(x) == -2.0));
    }

    #[test]
    fn direct_edge_removes_interior() {
        let g = WeightedGraph::from_edges(&[1.0, 1.0, -1.0, -1.0], &[(0, 1), (0, 2), (2, 3), (3, 1)]).unwrap();
        let mut inst = Instance::new(g);
        let piece: Vec<NodeId> = (0..4).map(NodeId).collect();
        replace_negative_tricomponent(&mut inst, &piece, NodeId(0), NodeId(1)).unwrap();
        assert_eq!(inst.graph().node_count(), 2);
    }

    #[test]
    fn leaf_block_gadget() {
        // triangle {c, x(+4), y(-2)} hanging off c(+1) in a host
        let g = WeightedGraph::from_edges(
            &[1.0, 4.0, -2.0, -3.0, 2.0, -1.0, 3.0, -2.0],
            &[(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 3)],
        )
        .unwrap();
        let want = oracle(&g);
        let mut inst = Instance::new(g);
        let mut ctx = DcContext::new(SolverConfig::default());
        process_bicomponent(&mut inst, &[NodeId(0), NodeId(1), NodeId(2)], Some(NodeId(0)), &mut ctx).unwrap();
        inst.validate().unwrap();
        assert_eq!(oracle(inst.graph()), want);
    }

    #[test]
    fn pair_gadget_on_path_piece() {
        // cycle u - x(+7) - v - a - b - c - u with a positive piece u-x-v
        let g = WeightedGraph::from_edges(
            &[-1.0, -1.0, 7.0, -2.0, 3.0, -2.0, 1.0],
            &[(0, 2), (2, 1), (1, 3), (3, 4), (4, 5), (5, 6), (6, 0)],
        )
        .unwrap();
        let want = oracle(&g);
        let (sol, _) = solve_mwcs(&g, &DcConfig::default()).unwrap();
        assert!((sol.objective - want).abs() < 1e-9);
    }

    #[test]
    fn matches_oracle_on_random_graphs() {
        use crate::generate::{erdos_renyi, multi_block};
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for trial in 0..200 {
            let g = if trial % 2 == 0 {
                erdos_renyi(&mut rng, 6 + trial % 9, 0.35, -10.0, 10.0)
            } else {
                multi_block(&mut rng, 8 + trial % 8, -10.0, 10.0)
            };
            let (sol, report) = solve_mwcs(&g, &DcConfig::default()).unwrap();
            assert!(!report.aborted);
            assert!(g.is_connected_subset(&sol.selected), "trial {trial}");
            assert!((sol.objective - oracle(&g)).abs() < 1e-9, "trial {trial}");
        }
    }
}
