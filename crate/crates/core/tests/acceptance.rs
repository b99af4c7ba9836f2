//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
//! criterion fails. Runs without the libtest harness so the lines always
//! reach the console.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mwcs_core::decompose::{
    process_tricomponent, replace_leaf_block, DcContext, GadgetCoverage, TriOutcome,
};
use mwcs_core::generate::{
    degree_two_negatives, erdos_renyi, host_with_leaf_block, host_with_pair_component, host_with_split_piece, multi_block, negative_chains,
    random_graph, random_pcst, random_tree, sparse, twin_hubs,
};
use mwcs_core::io::SolutionReport;
use mwcs_core::oracle::brute_force;
use mwcs_core::preprocess::{
    rule_isolated_negative, rule_least_cost, rule_merge_adjacent_positive, rule_mirrored_hubs, rule_negative_chain,
};
use mwcs_core::pipeline::preprocess_summary;
use mwcs_core::solver::heuristic::{tree_dp, FractionalPoint};
use mwcs_core::solver::ilp::{check_feasible, emit_ilp};
use mwcs_core::solver::separation::{separate_fractional, separate_integral, IntegralRoot};
use mwcs_core::transforms::{brute_force_pcst, mwcs_solution_to_pcst, pcst_to_mwcs};
use mwcs_core::{run, CompactGraph, Instance, Mode, NodeId, PreprocessConfig, RunConfig, SolverConfig, WeightedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

struct Outcome {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn compact(g: &WeightedGraph) -> CompactGraph {
    let nodes: Vec<NodeId> = g.nodes().collect();
    g.compact(&nodes)
}

fn oracle(g: &WeightedGraph, allow_empty: bool) -> f64 {
    brute_force(&compact(g), None, allow_empty).expect("oracle-sized instance").weight
}

/// Optimum of the reduced instance, mapped back: value plus whether the
/// expanded witness is connected in the original graph and weighs the same.
fn reduced_optimum(inst: &Instance, allow_empty: bool) -> (f64, bool) {
    let c = compact(inst.graph());
    if c.is_empty() {
        return (0.0, true);
    }
    let opt = brute_force(&c, None, allow_empty).expect("oracle-sized instance");
    if opt.nodes.is_empty() {
        return (opt.weight, true);
    }
    let chosen: Vec<NodeId> = opt.nodes.iter().map(|&i| c.ids[i]).collect();
    let expanded = inst.expand(&chosen).expect("live nodes");
    let original = inst.original();
    let ok = original.is_connected_subset(&expanded) && (original.induced_weight(&expanded) - opt.weight).abs() < 1e-7;
    (opt.weight, ok)
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let ps = [0.2, 0.35, 0.5];
    let mut graphs = Vec::new();
    for i in 0..500 {
        let n = rng.random_range(6..=16);
        graphs.push(erdos_renyi(&mut rng, n, ps[i % 3], -10.0, 10.0));
    }
    for _ in 0..100 {
        let n = rng.random_range(10..=20);
        graphs.push(multi_block(&mut rng, n, -10.0, 10.0));
    }
    let start = Instant::now();
    let mut failures = 0;
    for g in &graphs {
        let expect = oracle(g, false);
        for mode in Mode::ALL {
            let cfg = RunConfig {
                mode,
                ..Default::default()
            };
            let (sol, _) = run(g, &[], &cfg).expect("solve");
            let ok = sol.is_optimal()
                && (sol.objective - expect).abs() <= TOL
                && g.is_connected_subset(&sol.selected)
                && (g.induced_weight(&sol.selected) - sol.objective).abs() <= TOL;
            failures += usize::from(!ok);
        }
    }
    verdict(
        failures == 0,
        format!(
            "{} instances x 3 modes, {failures} mismatches, {:.1}s",
            graphs.len(),
            start.elapsed().as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    type Rule = fn(&mut Instance) -> mwcs_core::RuleReport;
    let rules: [(&str, Rule); 5] = [
        ("isolated-negative", rule_isolated_negative),
        ("merge-positive", rule_merge_adjacent_positive),
        ("negative-chain", rule_negative_chain),
        ("mirrored-hubs", rule_mirrored_hubs),
        ("least-cost", rule_least_cost),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2002);
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, rule) in rules {
        let mut failures = 0;
        let mut fired = 0;
        for i in 0..200 {
            let size = rng.random_range(0..=9usize);
            let g = match i % 4 {
                0 => erdos_renyi(&mut rng, 6 + size, 0.3, -10.0, 10.0),
                1 => negative_chains(&mut rng, 4 + size % 3, -10.0, 10.0),
                2 => twin_hubs(&mut rng, 4 + size % 6, 1 + size % 3, -10.0, 10.0),
                _ => degree_two_negatives(&mut rng, 6 + size, -10.0, 10.0),
            };
            if g.node_count() > 22 {
                continue;
            }
            // with no positive weight the rules only keep the empty optimum
            let expect = oracle(&g, true);
            let mut inst = Instance::new(g);
            let report = rule(&mut inst);
            fired += usize::from(report.applications > 0);
            let (got, witness_ok) = reduced_optimum(&inst, true);
            if (got - expect).abs() > 1e-7 || !witness_ok || inst.validate().is_err() {
                failures += 1;
            }
        }
        passed &= failures == 0 && fired > 0;
        parts.push(format!("{name}: {failures} failures ({fired} fired)"));
    }
    verdict(passed, parts.join("; "))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3003);
    let cfg = SolverConfig::default();
    let mut leaf_failures = 0;
    for _ in 0..300 {
        let core = rng.random_range(4..=10);
        let block = rng.random_range(2..=8);
        let (g, nodes, cut) = host_with_leaf_block(&mut rng, core, block, -10.0, 10.0);
        let expect = oracle(&g, false);
        let mut inst = Instance::new(g);
        let applied = replace_leaf_block(&mut inst, &nodes, Some(cut), &cfg).expect("leaf block");
        let (got, witness_ok) = reduced_optimum(&inst, false);
        if !applied || (got - expect).abs() > 1e-7 || !witness_ok || inst.validate().is_err() {
            leaf_failures += 1;
        }
    }

    let mut pair_failures = 0;
    let mut replaced = 0;
    let mut ctx = DcContext::new(SolverConfig::default());
    let hosts = 420;
    for i in 0..hosts {
        let core = rng.random_range(3..=9);
        let (g, piece, u, v) = if i < 300 {
            let interior = rng.random_range(2..=8);
            host_with_pair_component(&mut rng, core, interior, -10.0, 10.0)
        } else {
            let (left, right) = (rng.random_range(1..=4), rng.random_range(1..=4));
            host_with_split_piece(&mut rng, core, left, right, -10.0, 10.0)
        };
        let expect = oracle(&g, false);
        let mut inst = Instance::new(g);
        let outcome = process_tricomponent(&mut inst, &piece, u, v, &mut ctx).expect("pair piece");
        replaced += usize::from(outcome == TriOutcome::Replaced);
        let (got, witness_ok) = reduced_optimum(&inst, false);
        if outcome == TriOutcome::Aborted || (got - expect).abs() > 1e-7 || !witness_ok || inst.validate().is_err() {
            pair_failures += 1;
        }
    }
    let GadgetCoverage {
        disjoint,
        shared,
        bridge,
        closure,
        built,
        accepted,
        unsound,
        weaker,
        no_shrink,
    } = ctx.report.coverage;
    let coverage_ok = [disjoint, shared, bridge, closure].iter().all(|&c| c >= 10);
    verdict(
        leaf_failures == 0 && pair_failures == 0 && coverage_ok && replaced > 0,
        format!(
            "leaf blocks: 300 hosts, {leaf_failures} failures; pair pieces: {hosts} hosts, {pair_failures} failures, \
             {replaced} replaced; branches disjoint={disjoint} shared={shared} bridge={bridge} closure={closure}; \
             plans built={built} accepted={accepted} unsound={unsound} weaker={weaker} no-shrink={no_shrink}"
        ),
    )
}

/// Nodes flagged by integral cuts: every selected node of a component that
/// misses a root.
fn integral_targets(g: &CompactGraph, x: &[bool], root: IntegralRoot<'_>) -> BTreeSet<(Option<usize>, usize)> {
    let rooted = matches!(root, IntegralRoot::Set(_));
    separate_integral(g, x, root)
        .expect("valid root")
        .into_iter()
        .flat_map(|c| {
            let r = if rooted { c.root } else { None };
            c.set.into_iter().map(move |v| (r, v))
        })
        .collect()
}

fn fractional_targets(g: &CompactGraph, point: &FractionalPoint, roots: Option<&[usize]>) -> BTreeSet<(Option<usize>, usize)> {
    separate_fractional(g, point, roots)
        .expect("valid point")
        .into_iter()
        .map(|c| (c.root, c.target))
        .collect()
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4004);
    let n = 8;
    let mut separation_mismatches = 0;
    let mut feasibility_mismatches = 0;
    let mut points = 0;
    for _ in 0..50 {
        let g = random_graph(&mut rng, n, 0.35, -10.0, 10.0);
        let unrooted = emit_ilp(&g, None, false);
        for mask in 0u32..1 << n {
            let x: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
            let xf: Vec<f64> = x.iter().map(|&b| f64::from(u8::from(b))).collect();
            let selected: Vec<usize> = (0..n).filter(|&v| x[v]).collect();
            let connected = !selected.is_empty() && g.is_connected_set(&selected);

            // separation, unrooted: every selected node as the root
            for &r in &selected {
                let y: Vec<bool> = (0..n).map(|v| v == r).collect();
                let point = FractionalPoint {
                    x: xf.clone(),
                    y: Some(y.iter().map(|&b| f64::from(u8::from(b))).collect()),
                };
                points += 1;
                if integral_targets(&g, &x, IntegralRoot::Y(&y)) != fractional_targets(&g, &point, None) {
                    separation_mismatches += 1;
                }
            }
            // separation, rooted: first and last selected node
            if let (Some(&a), Some(&b)) = (selected.first(), selected.last()) {
                let roots = if a == b { vec![a] } else { vec![a, b] };
                let point = FractionalPoint { x: xf.clone(), y: None };
                points += 1;
                if integral_targets(&g, &x, IntegralRoot::Set(&roots)) != fractional_targets(&g, &point, Some(&roots)) {
                    separation_mismatches += 1;
                }
            }

            // feasibility, unrooted: one-hot y on any node, or no root at all
            for r in (0..n).map(Some).chain([None]) {
                let y: Vec<bool> = (0..n).map(|v| Some(v) == r).collect();
                let accepted = check_feasible(&g, &unrooted, &x, IntegralRoot::Y(&y)).expect("check").is_empty();
                let expect = connected && r.is_some_and(|r| x[r]);
                feasibility_mismatches += usize::from(accepted != expect);
            }
            // feasibility, rooted at {0} and at {0, n-1}
            for roots in [vec![0], vec![0, n - 1]] {
                let model = emit_ilp(&g, Some(&roots), false);
                let accepted = check_feasible(&g, &model, &x, IntegralRoot::Set(&roots)).expect("check").is_empty();
                let expect = connected && roots.iter().all(|&r| x[r]);
                feasibility_mismatches += usize::from(accepted != expect);
            }
        }
    }
    verdict(
        separation_mismatches == 0 && feasibility_mismatches == 0,
        format!(
            "50 graphs, {points} separation points, {separation_mismatches} separation mismatches, \
             {feasibility_mismatches} feasibility mismatches"
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5005);
    let mut failures = 0;
    for i in 0..500 {
        let n = rng.random_range(1..=16);
        let t = random_tree(&mut rng, n, -10.0, 10.0);
        let r = rng.random_range(0..n);
        // rooted: required set {r} or {r, s}
        let required = if i % 2 == 0 { vec![r] } else { vec![r, rng.random_range(0..n)] };
        let dp = tree_dp(&t, r, &required).expect("tree");
        let expect = brute_force(&t, Some(&required), false).expect("oracle").weight;
        let rooted_ok = (dp.weight - expect).abs() <= TOL
            && t.is_connected_set(&dp.witness)
            && required.iter().all(|q| dp.witness.contains(q))
            && (t.weight_of(&dp.witness) - dp.weight).abs() <= TOL;
        // unrooted: best over every root
        let best = (0..n)
            .map(|v| tree_dp(&t, v, &[v]).expect("tree").weight)
            .fold(f64::NEG_INFINITY, f64::max);
        let unrooted_ok = (best - brute_force(&t, None, false).expect("oracle").weight).abs() <= TOL;
        failures += usize::from(!(rooted_ok && unrooted_ok));
    }
    let big = random_tree(&mut rng, 100_000, -10.0, 10.0);
    let start = Instant::now();
    let dp = tree_dp(&big, 0, &[0]).expect("tree");
    let elapsed = start.elapsed().as_secs_f64();
    let big_ok = big.is_connected_set(&dp.witness) && elapsed < 1.0;
    verdict(
        failures == 0 && big_ok,
        format!("500 trees, {failures} mismatches; n=100000 in {elapsed:.3}s"),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6006);
    let mut failures = 0;
    for _ in 0..200 {
        let n = rng.random_range(2..=8);
        let m = rng.random_range(1..=(16 - n).min(n * (n - 1) / 2));
        let inst = random_pcst(&mut rng, n, m);
        let (g, map) = pcst_to_mwcs(&inst);
        let c = compact(&g);
        let opt = brute_force(&c, None, false).expect("oracle");
        let selected: BTreeSet<NodeId> = opt.nodes.iter().map(|&i| c.ids[i]).collect();
        let tree = mwcs_solution_to_pcst(&selected, &map, &inst).expect("tree");
        let best = brute_force_pcst(&inst).expect("pcst oracle");
        if (tree.profit - opt.weight).abs() > 1e-7 || (best.profit - opt.weight).abs() > 1e-7 {
            failures += 1;
        }
    }
    verdict(failures == 0, format!("200 instances with n+m <= 16, {failures} mismatches"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7007);
    let mut fractions: Vec<f64> = (0..100)
        .map(|_| {
            let g = sparse(&mut rng, 200, 300, 0.2, -10.0, 10.0);
            preprocess_summary(&g, &PreprocessConfig::default()).node_fraction()
        })
        .collect();
    fractions.sort_by(f64::total_cmp);
    let median = (fractions[49] + fractions[50]) / 2.0;
    verdict(
        median < 0.9,
        format!(
            "median node fraction {median:.3} (min {:.3}, max {:.3}) over 100 instances",
            fractions[0], fractions[99]
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8008);
    let mut solved = 0;
    let mut slowest = 0.0f64;
    for _ in 0..20 {
        let g = sparse(&mut rng, 500, 1000, 0.1, -10.0, 10.0);
        let start = Instant::now();
        let cfg = RunConfig {
            mode: Mode::Dc,
            solver: SolverConfig {
                deadline: Some(start + Duration::from_secs(60)),
                ..Default::default()
            },
            ..Default::default()
        };
        let (sol, _) = run(&g, &[], &cfg).expect("solve");
        let secs = start.elapsed().as_secs_f64();
        slowest = slowest.max(secs);
        solved += usize::from(sol.is_optimal() && secs <= 60.0);
    }
    verdict(solved >= 18, format!("{solved}/20 solved to optimality within 60s, slowest {slowest:.2}s"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9009);
    let mut differing = 0;
    let mut cases = 0;
    for i in 0..10 {
        let g = if i % 2 == 0 {
            sparse(&mut rng, 120, 200, 0.2, -10.0, 10.0)
        } else {
            multi_block(&mut rng, 40, -10.0, 10.0)
        };
        let render = |mode: Mode| {
            let cfg = RunConfig {
                mode,
                solver: SolverConfig {
                    seed: 7,
                    ..Default::default()
                },
                ..Default::default()
            };
            let (sol, _) = run(&g, &[], &cfg).expect("solve");
            let json = SolutionReport::new(&sol, &g).to_json().expect("json");
            let c = compact(&g);
            (json, emit_ilp(&c, None, true).to_lp(), emit_ilp(&c, Some(&[0]), false).to_lp())
        };
        for mode in Mode::ALL {
            cases += 1;
            differing += usize::from(render(mode) != render(mode));
        }
    }
    verdict(differing == 0, format!("{cases} solution/model pairs rendered twice, {differing} differ"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("oracle equivalence of all modes", criterion_1),
        ("reduction rule safety", criterion_2),
        ("leaf-block and pair gadgets", criterion_3),
        ("separation and feasibility checks", criterion_4),
        ("tree dynamic program", criterion_5),
        ("prize-collecting transform", criterion_6),
        ("preprocessing effectiveness", criterion_7),
        ("performance smoke test", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {} ({name}): {}", i + 1, outcome.detail);
        failed += usize::from(!outcome.passed);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
