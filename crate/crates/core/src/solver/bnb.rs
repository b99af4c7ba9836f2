//! Best-first branch-and-bound over node inclusion and exclusion.
//!
//! A subproblem fixes some nodes in and some out. Free nonnegative nodes next
//! to the fixed-in region are absorbed, since adding them never hurts. The
//! bound adds to the fixed-in weight the best gain `prefix(P) - d(p_k)` over
//! positive free nodes sorted by their distance `d` from the fixed-in region,
//! where entering a node costs its negative weight. A dual ascent on the
//! rooted directed view tightens this bound, rules out nodes by reduced
//! cost, and picks the branching node: the free neighbour of the fixed-in
//! region that is cheapest to route through.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::CompactGraph;
use crate::solver::backoff::BackoffSchedule;
use crate::solver::dual_ascent::dual_ascent;
use crate::solver::heuristic::{primal_heuristic, FractionalPoint};
use crate::solver::separation::{separate_integral, IntegralRoot};
use crate::solver::{Outcome, SearchStats, SolverConfig};

const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Free,
    In,
    Out,
}

struct Decision {
    node: usize,
    include: bool,
    /// Nodes ruled out by reduced costs at the parent.
    fixed: Rc<[usize]>,
    parent: Option<Rc<Decision>>,
}

struct Open {
    key: f64,
    seq: u64,
    sub: usize,
    chain: Option<Rc<Decision>>,
}

impl PartialEq for Open {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Open {}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Open {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key).then(other.seq.cmp(&self.seq))
    }
}

/// Min-heap entry for Dijkstra.
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

struct Subproblem {
    include: Vec<usize>,
    exclude: Vec<usize>,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

struct Search<'a> {
    g: &'a CompactGraph,
    best_nodes: Vec<usize>,
    best: f64,
    backoff: BackoffSchedule,
    stats: SearchStats,
}

enum Step {
    Prune,
    Branch { node: usize, bound: f64, fixed: Vec<usize> },
}

impl<'a> Search<'a> {
    fn offer(&mut self, nodes: Vec<usize>) -> bool {
        let w = self.g.weight_of(&nodes);
        if w > self.best + EPS && self.g.is_connected_set(&nodes) {
            self.best = w;
            self.best_nodes = nodes;
            true
        } else {
            false
        }
    }

    /// Multi-source shortest distances from `sources` over non-excluded nodes.
    fn dijkstra(&self, state: &[State], sources: &[usize]) -> (Vec<f64>, Vec<usize>) {
        let n = self.g.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![usize::MAX; n];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s] = 0.0;
            heap.push(Entry(0.0, s));
        }
        while let Some(Entry(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &w in &self.g.adj[u] {
                if state[w] == State::Out {
                    continue;
                }
                let nd = d + (-self.g.weights[w]).max(0.0);
                if nd < dist[w] {
                    dist[w] = nd;
                    pred[w] = u;
                    heap.push(Entry(nd, w));
                }
            }
        }
        (dist, pred)
    }

    /// Best `prefix(P) - d(p_k)` over free positive nodes sorted by distance.
    fn reach_gain(&self, state: &[State], dist: &[f64]) -> f64 {
        let g = self.g;
        let mut positives: Vec<(f64, usize)> = (0..g.len())
            .filter(|&v| state[v] == State::Free && g.weights[v] > 0.0 && dist[v].is_finite())
            .map(|v| (dist[v], v))
            .collect();
        positives.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut gain = 0.0f64;
        let mut prefix = 0.0;
        for &(d, v) in &positives {
            prefix += g.weights[v];
            gain = gain.max(prefix - d);
        }
        gain
    }

    /// Primal heuristic on the nodes allowed by `mask` (all non-excluded
    /// nodes when `None`), keeping the fixed-in nodes.
    fn refresh(&mut self, state: &[State], mask: Option<&[bool]>) -> bool {
        let keep: Vec<usize> = (0..self.g.len())
            .filter(|&v| state[v] == State::In || (state[v] != State::Out && mask.is_none_or(|m| m[v])))
            .collect();
        let mut local = vec![usize::MAX; self.g.len()];
        for (i, &v) in keep.iter().enumerate() {
            local[v] = i;
        }
        let edges: Vec<(usize, usize)> = keep
            .iter()
            .flat_map(|&v| {
                let local = &local;
                self.g.adj[v]
                    .iter()
                    .filter(move |&&w| v < w && local[w] != usize::MAX)
                    .map(move |&w| (local[v], local[w]))
            })
            .collect();
        let sub = CompactGraph::from_edges(keep.iter().map(|&v| self.g.weights[v]).collect(), &edges);
        let point = FractionalPoint {
            x: keep
                .iter()
                .map(|&v| match state[v] {
                    State::In => 1.0,
                    _ if self.g.weights[v] >= 0.0 => 1.0,
                    _ => 0.5,
                })
                .collect(),
            y: None,
        };
        let roots: Vec<usize> = keep.iter().filter(|&&v| state[v] == State::In).map(|&v| local[v]).collect();
        self.stats.heuristic_calls += 1;
        match primal_heuristic(&sub, Some(&point), Some(&roots)) {
            Some(h) => self.offer(h.nodes.into_iter().map(|i| keep[i]).collect()),
            None => false,
        }
    }

    fn expand(&mut self, state: &mut [State]) -> Step {
        let g = self.g;
        let mut stack: Vec<usize> = (0..g.len()).filter(|&v| state[v] == State::In).collect();
        while let Some(u) = stack.pop() {
            for &w in &g.adj[u] {
                if state[w] == State::Free && g.weights[w] >= 0.0 {
                    state[w] = State::In;
                    stack.push(w);
                }
            }
        }
        let members: Vec<bool> = state.iter().map(|&s| s == State::In).collect();
        let inside: Vec<usize> = (0..g.len()).filter(|&v| members[v]).collect();
        let w_in = g.weight_of(&inside);
        let comps = g.components_mask(&members);
        if comps.len() <= 1
            && w_in > self.best + EPS
            && separate_integral(g, &members, IntegralRoot::Set(&[inside[0]]))
                .map(|c| c.is_empty())
                .unwrap_or(false)
        {
            self.best = w_in;
            self.best_nodes = inside.clone();
        }
        let (mut dist, _) = self.dijkstra(state, &inside);
        let mut bound = w_in + self.reach_gain(state, &dist);
        if bound <= self.best + EPS {
            return Step::Prune;
        }

        let excluded: Vec<bool> = state.iter().map(|&s| s == State::Out).collect();
        let Some(ascent) = dual_ascent(g, &members, &excluded) else {
            return Step::Prune;
        };
        self.stats.ascents += 1;
        bound = bound.min(w_in + ascent.prizes - ascent.lower);
        if bound <= self.best + EPS {
            return Step::Prune;
        }
        if self.backoff.tick() {
            let mut improved = self.refresh(state, Some(&ascent.zero_reach));
            improved |= self.refresh(state, None);
            self.backoff.record(improved);
            if bound <= self.best + EPS {
                return Step::Prune;
            }
        }
        let fixed: Vec<usize> = (0..g.len())
            .filter(|&v| state[v] == State::Free && w_in + ascent.prizes - ascent.through[v] <= self.best + EPS)
            .collect();
        if !fixed.is_empty() {
            for &v in &fixed {
                state[v] = State::Out;
            }
            (dist, _) = self.dijkstra(state, &inside);
            bound = bound.min(w_in + self.reach_gain(state, &dist));
            if bound <= self.best + EPS {
                return Step::Prune;
            }
        }
        let positives: Vec<(f64, usize)> = (0..g.len())
            .filter(|&v| state[v] == State::Free && g.weights[v] > 0.0 && dist[v].is_finite())
            .map(|v| (dist[v], v))
            .collect();

        if comps.len() > 1 {
            // connect the first fixed component to the nearest other one
            let (d0, p0) = self.dijkstra(state, &comps[0]);
            let first: Vec<bool> = {
                let mut m = vec![false; g.len()];
                for &v in &comps[0] {
                    m[v] = true;
                }
                m
            };
            if inside.iter().any(|&v| !d0[v].is_finite()) {
                return Step::Prune;
            }
            let target = inside
                .iter()
                .copied()
                .filter(|&v| !first[v])
                .min_by(|&a, &b| d0[a].total_cmp(&d0[b]).then(a.cmp(&b)))
                .expect("several components");
            let mut b = target;
            while !first[p0[b]] {
                b = p0[b];
            }
            return Step::Branch { node: b, bound, fixed };
        }

        if positives.is_empty() {
            return Step::Prune;
        }
        // the frontier node whose cheapest routing costs least
        let frontier = (0..g.len())
            .filter(|&v| state[v] == State::Free && g.adj[v].iter().any(|&u| members[u]))
            .min_by(|&a, &b| ascent.through[a].total_cmp(&ascent.through[b]).then(a.cmp(&b)));
        let Some(b) = frontier else {
            return Step::Prune;
        };
        Step::Branch { node: b, bound, fixed }
    }
}

fn trivial_bound(g: &CompactGraph, sub: &Subproblem) -> f64 {
    let mut fixed = vec![false; g.len()];
    for &v in sub.include.iter().chain(&sub.exclude) {
        fixed[v] = true;
    }
    let inc: f64 = sub.include.iter().map(|&v| g.weights[v]).sum();
    inc + (0..g.len())
        .filter(|&v| !fixed[v] && g.weights[v] > 0.0)
        .map(|v| g.weights[v])
        .sum::<f64>()
}

/// Exact search. `roots` empty or `None` means unrooted.
pub fn bnb_drive(g: &CompactGraph, roots: Option<&[usize]>, cfg: &SolverConfig) -> Result<Outcome> {
    let n = g.len();
    let mut roots: Vec<usize> = roots.unwrap_or(&[]).to_vec();
    roots.sort_unstable();
    roots.dedup();
    if let Some(&r) = roots.iter().find(|&&r| r >= n) {
        return Err(Error::Precondition(format!("root {r} out of range")));
    }
    if !roots.is_empty() {
        let comp = g.components().into_iter().find(|c| c.contains(&roots[0])).unwrap();
        if roots.iter().any(|r| !comp.contains(r)) {
            return Err(Error::Infeasible("roots lie in different components".into()));
        }
    }
    if n == 0 {
        return Ok(Outcome::exact(Vec::new(), 0.0, SearchStats::default()));
    }
    let positives: Vec<usize> = {
        let mut p: Vec<usize> = (0..n).filter(|&v| g.weights[v] > 0.0).collect();
        p.sort_by(|&a, &b| {
            g.weights[b]
                .total_cmp(&g.weights[a])
                .then(splitmix(cfg.seed ^ a as u64).cmp(&splitmix(cfg.seed ^ b as u64)))
                .then(a.cmp(&b))
        });
        p
    };
    if roots.is_empty() && positives.is_empty() {
        let v = (0..n).fold(0, |b, v| if g.weights[v] > g.weights[b] { v } else { b });
        return Ok(Outcome::exact(vec![v], g.weights[v], SearchStats::default()));
    }

    let start = primal_heuristic(g, None, (!roots.is_empty()).then_some(&roots[..]))
        .ok_or_else(|| Error::Infeasible("no connected set holds every root".into()))?;
    let mut search = Search {
        g,
        best: start.weight,
        best_nodes: start.nodes,
        backoff: BackoffSchedule::new(),
        stats: SearchStats::default(),
    };

    let subs: Vec<Subproblem> = if roots.is_empty() {
        positives
            .iter()
            .enumerate()
            .map(|(i, &p)| Subproblem {
                include: vec![p],
                exclude: positives[..i].to_vec(),
            })
            .collect()
    } else {
        vec![Subproblem {
            include: roots.clone(),
            exclude: Vec::new(),
        }]
    };
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    for (i, sub) in subs.iter().enumerate() {
        heap.push(Open {
            key: trivial_bound(g, sub),
            seq,
            sub: i,
            chain: None,
        });
        seq += 1;
    }

    let mut exhausted = false;
    let mut cut_off = f64::NEG_INFINITY;
    loop {
        let out_of_budget = cfg.deadline.is_some_and(|d| Instant::now() >= d)
            || cfg.node_limit.is_some_and(|l| search.stats.nodes >= l);
        let Some(top) = heap.peek() else {
            break;
        };
        if top.key <= search.best + EPS {
            break;
        }
        if out_of_budget {
            exhausted = true;
            cut_off = top.key;
            break;
        }
        let open = heap.pop().unwrap();
        if cfg.record_bounds {
            search.stats.bound_log.push((search.best, open.key));
        }
        search.stats.nodes += 1;

        let sub = &subs[open.sub];
        let mut state = vec![State::Free; n];
        for &v in &sub.include {
            state[v] = State::In;
        }
        for &v in &sub.exclude {
            state[v] = State::Out;
        }
        let mut link = open.chain.as_deref();
        while let Some(d) = link {
            for &v in d.fixed.iter() {
                state[v] = State::Out;
            }
            state[d.node] = if d.include { State::In } else { State::Out };
            link = d.parent.as_deref();
        }
        if let Step::Branch { node, bound, fixed } = search.expand(&mut state) {
            let fixed: Rc<[usize]> = fixed.into();
            for include in [true, false] {
                heap.push(Open {
                    key: bound,
                    seq,
                    sub: open.sub,
                    chain: Some(Rc::new(Decision {
                        node,
                        include,
                        fixed: fixed.clone(),
                        parent: open.chain.clone(),
                    })),
                });
                seq += 1;
            }
        }
    }

    let mut nodes = search.best_nodes;
    nodes.sort_unstable();
    let objective = g.weight_of(&nodes);
    let stats = search.stats;
    if exhausted {
        Ok(Outcome {
            nodes,
            objective,
            lower: objective,
            upper: cut_off.max(objective),
            optimal: false,
            stats,
        })
    } else {
        Ok(Outcome::exact(nodes, objective, stats))
    }
}
