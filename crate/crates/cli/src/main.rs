use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mwcs_core::decompose::{solve_mwcs, DcConfig};
use mwcs_core::generate;
use mwcs_core::io::{read_instance, write_json, write_stp, Format, ProblemInstance, SolutionReport};
use mwcs_core::oracle::brute_force;
use mwcs_core::pipeline::preprocess_summary;
use mwcs_core::solver::ilp::emit_ilp;
use mwcs_core::{preprocess, run, Error, Instance, Mode, NodeId, PreprocessConfig, RunConfig, Solution, SolverConfig, Status};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "mwcs", version, about = "Maximum-weight connected subgraph solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and print the solution as JSON.
    Solve(SolveArgs),
    /// Solve by exhaustive enumeration (small instances only).
    Oracle(SolveArgs),
    /// Apply the reduction rules and print the reduced instance.
    Preprocess(PreprocessArgs),
    /// Run the decomposition scheme and print its report as JSON.
    Decompose(InputArgs),
    /// Solve every instance of a directory and print one CSV row each.
    Bench(BenchArgs),
    /// Write a random instance.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    NoPre,
    Pre,
    Dc,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::NoPre => Mode::NoPre,
            ModeArg::Pre => Mode::Pre,
            ModeArg::Dc => Mode::Dc,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Stp,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Stp => Format::Stp,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Args)]
struct InputArgs {
    instance: PathBuf,
    /// Input format; guessed from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl InputArgs {
    fn load(&self) -> mwcs_core::Result<ProblemInstance> {
        read_instance(&self.instance, self.format.map(Format::from))
    }

    fn solver(&self) -> SolverConfig {
        solver_config(self.time_limit, self.seed)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "dc")]
    mode: ModeArg,
    /// Comma-separated node labels that must be selected.
    #[arg(long, value_delimiter = ',')]
    rooted: Vec<String>,
    /// Return the empty set when no connected set has positive weight.
    #[arg(long)]
    allow_empty: bool,
    /// Write the integer program in LP format to this path.
    #[arg(long)]
    emit_ilp: Option<PathBuf>,
}

#[derive(Args)]
struct PreprocessArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Format of the reduced instance.
    #[arg(long, value_enum, default_value = "stp")]
    output_format: FormatArg,
    /// Write the reduced instance here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write the rule report here instead of stderr.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    corpus: PathBuf,
    /// Per-instance, per-mode limit in seconds.
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Er,
    Sparse,
    MultiBlock,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum, default_value = "sparse")]
    kind: Kind,
    #[arg(long, default_value_t = 50)]
    nodes: usize,
    /// Edge count for sparse graphs.
    #[arg(long)]
    edges: Option<usize>,
    /// Edge probability for Erdős-Rényi graphs.
    #[arg(long, default_value_t = 0.3)]
    p: f64,
    /// Share of positive nodes for sparse graphs.
    #[arg(long, default_value_t = 0.2)]
    positive: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "stp")]
    format: FormatArg,
}

fn solver_config(time_limit: Option<f64>, seed: u64) -> SolverConfig {
    SolverConfig {
        deadline: time_limit.map(|s| Instant::now() + Duration::from_secs_f64(s.max(0.0))),
        seed,
        ..Default::default()
    }
}

fn resolve_roots(inst: &ProblemInstance, labels: &[String]) -> mwcs_core::Result<Vec<NodeId>> {
    let g = &inst.graph;
    let mut roots = inst.roots.clone();
    for l in labels.iter().filter(|l| !l.is_empty()) {
        let v = g
            .nodes()
            .find(|&v| g.label(v) == l)
            .ok_or_else(|| Error::Precondition(format!("no node labelled {l:?}")))?;
        roots.push(v);
    }
    roots.sort();
    roots.dedup();
    Ok(roots)
}

fn write_model(inst: &ProblemInstance, roots: &[NodeId], path: &Path) -> anyhow::Result<()> {
    let g = &inst.graph;
    let nodes: Vec<NodeId> = g.nodes().collect();
    let c = g.compact(&nodes);
    let local: Vec<usize> = roots.iter().map(|r| c.ids.binary_search(r).expect("live root")).collect();
    let model = emit_ilp(&c, (!local.is_empty()).then_some(&local[..]), false);
    fs::write(path, model.to_lp()).with_context(|| format!("writing {}", path.display()))
}

fn print_solution(sol: &Solution, inst: &ProblemInstance) -> anyhow::Result<()> {
    println!("{}", SolutionReport::new(sol, &inst.graph).to_json()?);
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> anyhow::Result<()> {
    let inst = args.input.load()?;
    let roots = resolve_roots(&inst, &args.rooted)?;
    if let Some(path) = &args.emit_ilp {
        write_model(&inst, &roots, path)?;
    }
    let cfg = RunConfig {
        mode: args.mode.into(),
        solver: args.input.solver(),
        preprocess: PreprocessConfig::default(),
        allow_empty: args.allow_empty,
    };
    let (sol, report) = run(&inst.graph, &roots, &cfg)?;
    log::info!(
        "{} mode: {} -> {} nodes, {:.3}s",
        report.mode,
        report.nodes_before,
        report.nodes_after,
        report.seconds
    );
    print_solution(&sol, &inst)
}

fn cmd_oracle(args: &SolveArgs) -> anyhow::Result<()> {
    let inst = args.input.load()?;
    let roots = resolve_roots(&inst, &args.rooted)?;
    let g = &inst.graph;
    let nodes: Vec<NodeId> = g.nodes().collect();
    let c = g.compact(&nodes);
    let local: Vec<usize> = roots.iter().map(|r| c.ids.binary_search(r).expect("live root")).collect();
    let opt = brute_force(&c, (!local.is_empty()).then_some(&local[..]), args.allow_empty)?;
    let sol = Solution {
        selected: opt.nodes.iter().map(|&i| c.ids[i]).collect(),
        objective: opt.weight,
        status: Status::Optimal,
    };
    print_solution(&sol, &inst)
}

fn cmd_preprocess(args: &PreprocessArgs) -> anyhow::Result<()> {
    let inst = args.input.load()?;
    if !inst.roots.is_empty() {
        bail!("reduction rules apply to unrooted instances only");
    }
    let mut work = Instance::new(inst.graph.clone());
    let reports = preprocess(&mut work, &PreprocessConfig::default());
    let g = work.graph();
    let text = match args.output_format {
        FormatArg::Stp => write_stp(g, &[]),
        FormatArg::Json => {
            let original = work.original();
            let origin = |v: NodeId| -> Vec<String> {
                work.trace().origin(v).iter().map(|&o| original.label(o).to_string()).collect()
            };
            write_json(g, &[], Some(&origin))?
        }
    };
    match &args.output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    let json = serde_json::to_string_pretty(&reports)?;
    match &args.report {
        Some(p) => fs::write(p, json).with_context(|| format!("writing {}", p.display()))?,
        None => eprintln!("{json}"),
    }
    Ok(())
}

fn cmd_decompose(args: &InputArgs) -> anyhow::Result<()> {
    let inst = args.load()?;
    let cfg = DcConfig {
        solver: args.solver(),
        preprocess: PreprocessConfig::default(),
    };
    let (_, report) = solve_mwcs(&inst.graph, &cfg)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

const BENCH_HEADER: &str = "instance,nodes,edges,nodes_after,edges_after,components_after,node_fraction,\
no_pre_lower,no_pre_upper,no_pre_seconds,pre_lower,pre_upper,pre_seconds,\
dc_lower,dc_upper,dc_seconds,blocks,positive_tricomponents,negative_tricomponents";

fn bench_row(path: &Path, inst: &ProblemInstance, args: &BenchArgs) -> anyhow::Result<String> {
    let g = &inst.graph;
    let pre = preprocess_summary(g, &PreprocessConfig::default());
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut row = format!(
        "{name},{},{},{},{},{},{:.6}",
        pre.nodes_before,
        pre.edges_before,
        pre.nodes_after,
        pre.edges_after,
        pre.components_after,
        pre.node_fraction()
    );
    let mut dc_counts = (0, 0, 0);
    for mode in Mode::ALL {
        let cfg = RunConfig {
            mode,
            solver: solver_config(Some(args.time_limit), args.seed),
            ..Default::default()
        };
        let (sol, report) = run(g, &inst.roots, &cfg)?;
        let (lower, upper) = sol.bounds();
        row.push_str(&format!(",{lower},{upper},{:.6}", report.seconds));
        if let Some(d) = report.decomposition {
            dc_counts = (d.blocks_processed + d.leaf_blocks_removed, d.positive_tricomponents, d.negative_tricomponents);
        }
    }
    row.push_str(&format!(",{},{},{}", dc_counts.0, dc_counts.1, dc_counts.2));
    Ok(row)
}

fn cmd_bench(args: &BenchArgs) -> anyhow::Result<()> {
    let mut files: Vec<PathBuf> = fs::read_dir(&args.corpus)
        .with_context(|| format!("reading {}", args.corpus.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| e.eq_ignore_ascii_case("stp") || e.eq_ignore_ascii_case("json"))
        })
        .collect();
    files.sort();
    println!("{BENCH_HEADER}");
    for path in files {
        let inst = read_instance(&path, None)?;
        println!("{}", bench_row(&path, &inst, args)?);
    }
    Ok(())
}

fn cmd_generate(args: &GenerateArgs) -> anyhow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let n = args.nodes;
    let g = match args.kind {
        Kind::Er => generate::erdos_renyi(&mut rng, n, args.p, -10.0, 10.0),
        Kind::Sparse => {
            let m = args.edges.unwrap_or(3 * n / 2);
            generate::sparse(&mut rng, n, m, args.positive, -10.0, 10.0)
        }
        Kind::MultiBlock => generate::multi_block(&mut rng, n, -10.0, 10.0),
    };
    let text = match args.format {
        FormatArg::Stp => write_stp(&g, &[]),
        FormatArg::Json => write_json(&g, &[], None)?,
    };
    print!("{text}");
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Parse { .. }) | Some(Error::Json(_)) => 2,
        Some(Error::Infeasible(_)) => 3,
        Some(Error::SizeLimit { .. }) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Preprocess(a) => cmd_preprocess(a),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Generate(a) => cmd_generate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
