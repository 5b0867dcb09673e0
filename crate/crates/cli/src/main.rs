//! `kmp`: generate, solve, export, validate and benchmark key-management
//! instances.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use kmp_core::analysis::{assignment_report, NaiveBaseline};
use kmp_core::graph::generate_er;
use kmp_core::harness::{
    self, builtin_tables, emit_csv_all, find_config, parse_csv, run_experiment, summary_table,
    ExperimentConfig, Scale,
};
use kmp_core::ilp::{build_ilp, write_lp, write_mps, MpsFormat};
use kmp_core::instance::{KeyAssignment, KmpInstance};
use kmp_core::solver::{solve_bb, BranchRule, SolverConfig};

const EXIT_INFEASIBLE: u8 = 2;

#[derive(Parser)]
#[command(name = "kmp", version, about = "q-composite key management for sensor networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a random connected instance and print it as JSON.
    Gen(GenArgs),
    /// Solve an instance exactly (within the limits) and print the result JSON.
    Solve(SolveArgs),
    /// Write the linearized binary program as MPS or LP.
    Export(ExportArgs),
    /// Check an assignment against an instance; exits 2 when infeasible.
    Validate(ValidateArgs),
    /// Run a batch of seeded instances for built-in configurations; CSV out.
    Bench(BenchArgs),
    /// Summarize a results CSV written by `bench`.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Take all parameters from a built-in configuration (e.g. q1-1).
    #[arg(long, conflicts_with_all = ["n", "density", "keys", "q", "p", "capacity", "usage"])]
    config_id: Option<String>,
    /// Instance index within the configuration; the seed is base_seed + index.
    #[arg(long, default_value_t = 0, requires = "config_id")]
    index: usize,
    #[arg(long, required_unless_present = "config_id")]
    n: Option<usize>,
    /// Edge probability d.
    #[arg(long, required_unless_present = "config_id")]
    density: Option<f64>,
    /// Key pool size |K|.
    #[arg(long, required_unless_present = "config_id")]
    keys: Option<usize>,
    #[arg(long, required_unless_present = "config_id")]
    q: Option<u32>,
    #[arg(long, required_unless_present = "config_id")]
    p: Option<f64>,
    #[arg(long, default_value_t = harness::DEFAULT_ALPHA)]
    alpha: u32,
    /// Memory per key m_k.
    #[arg(long, default_value_t = harness::DEFAULT_MEM_PER_KEY)]
    mem: u32,
    /// Ring capacity c_i.
    #[arg(long, required_unless_present = "config_id")]
    capacity: Option<u32>,
    /// Global usage limit t_k.
    #[arg(long, required_unless_present = "config_id")]
    usage: Option<u32>,
    /// Graph seed (defaults to 1, or base_seed + index with --config-id).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    DegreeFirst,
    Natural,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    /// Seconds.
    #[arg(long, default_value_t = 300.0)]
    time_limit: f64,
    /// Tie-breaking seed for the warm start.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long, value_enum, default_value = "degree-first")]
    branch_rule: RuleArg,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Mps,
    Lp,
}

#[derive(Args)]
struct ExportArgs {
    instance: PathBuf,
    #[arg(long, value_enum)]
    format: FormatArg,
    /// Fixed-column MPS instead of free MPS.
    #[arg(long)]
    fixed: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineArg {
    SpanningTree,
    AllEdges,
}

#[derive(Args)]
struct ValidateArgs {
    instance: PathBuf,
    /// `{"x": [[..]]}`; a `solve` result file also works.
    assignment: PathBuf,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
    #[arg(long, value_enum, default_value = "spanning-tree")]
    baseline: BaselineArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Desk,
    Full,
}

#[derive(Args)]
struct BenchArgs {
    /// Configuration ids (repeatable); `all` runs every built-in one.
    #[arg(long, required = true)]
    config_id: Vec<String>,
    #[arg(long, value_enum, default_value = "desk")]
    scale: ScaleArg,
    /// Overrides the instance count of the scale.
    #[arg(long)]
    instances: Option<usize>,
    /// Overrides the per-instance time limit (seconds) of the scale.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Instances solved concurrently.
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    #[arg(long)]
    base_seed: Option<u64>,
    /// CSV destination; the summary table goes to stderr.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    csv: PathBuf,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn stdout(text: &str) -> Result<()> {
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => stdout(text),
    }
}

fn load_instance(path: &Path) -> Result<KmpInstance> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn config(id: &str) -> Result<ExperimentConfig> {
    find_config(id).with_context(|| format!("unknown configuration `{id}`"))
}

fn gen(args: GenArgs) -> Result<()> {
    let inst = match &args.config_id {
        Some(id) => {
            let cfg = config(id)?;
            let seed = args.seed.unwrap_or_else(|| cfg.seed(args.index));
            cfg.instance_for_seed(seed)?
        }
        None => {
            // clap guarantees presence without --config-id
            let (n, d) = (args.n.unwrap_or(0), args.density.unwrap_or(0.0));
            let g = generate_er(n, d, args.seed.unwrap_or(harness::DEFAULT_BASE_SEED))?;
            KmpInstance::uniform(
                g,
                args.keys.unwrap_or(0),
                args.q.unwrap_or(0),
                args.p.unwrap_or(0.0),
                args.alpha,
                args.mem,
                args.capacity.unwrap_or(0),
                args.usage.unwrap_or(0),
            )?
        }
    };
    emit(args.output.as_deref(), &(serde_json::to_string(&inst)? + "\n"))
}

fn solve(args: SolveArgs) -> Result<()> {
    let inst = load_instance(&args.instance)?;
    let cfg = SolverConfig {
        time_limit: Duration::try_from_secs_f64(args.time_limit)
            .context("time limit must be a non-negative number of seconds")?,
        seed: args.seed,
        branch_rule: match args.branch_rule {
            RuleArg::DegreeFirst => BranchRule::DegreeFirst,
            RuleArg::Natural => BranchRule::Natural,
        },
        node_limit: args.node_limit,
    };
    let result = solve_bb(&inst, &cfg)?;
    emit(args.output.as_deref(), &(serde_json::to_string(&result)? + "\n"))
}

fn export(args: ExportArgs) -> Result<()> {
    let model = build_ilp(&load_instance(&args.instance)?);
    let text = match args.format {
        FormatArg::Mps => {
            let format = if args.fixed { MpsFormat::Fixed } else { MpsFormat::Free };
            write_mps(&model, format)?
        }
        FormatArg::Lp => {
            if args.fixed {
                bail!("--fixed only applies to MPS");
            }
            write_lp(&model)
        }
    };
    emit(args.output.as_deref(), &text)
}

fn validate(args: ValidateArgs) -> Result<bool> {
    let inst = load_instance(&args.instance)?;
    let a: KeyAssignment = serde_json::from_str(&read(&args.assignment)?)
        .with_context(|| format!("parsing {}", args.assignment.display()))?;
    let baseline = match args.baseline {
        BaselineArg::SpanningTree => NaiveBaseline::SpanningTree,
        BaselineArg::AllEdges => NaiveBaseline::AllEdges,
    };
    let report = assignment_report(&inst, &a, baseline)?;
    if args.json {
        stdout(&(serde_json::to_string_pretty(&report)? + "\n"))?;
    } else {
        stdout(&format!("{report}\n"))?;
    }
    Ok(report.feasible)
}

fn bench(args: BenchArgs) -> Result<()> {
    let mut configs = Vec::new();
    for id in &args.config_id {
        if id == "all" {
            configs.extend(builtin_tables());
        } else {
            configs.push(config(id)?);
        }
    }
    let scale = match args.scale {
        ScaleArg::Desk => Scale::Desk,
        ScaleArg::Full => Scale::Full,
    };
    let mut all = Vec::new();
    for cfg in configs {
        let mut cfg = cfg.scaled(scale);
        if let Some(count) = args.instances {
            cfg.instance_count = count;
        }
        if let Some(secs) = args.time_limit {
            cfg.time_limit_seconds = secs;
        }
        if let Some(seed) = args.base_seed {
            cfg.base_seed = seed;
        }
        eprintln!(
            "{}: {} instances, {} s limit",
            cfg.config_id, cfg.instance_count, cfg.time_limit_seconds
        );
        all.push(run_experiment(&cfg, args.parallel.max(1))?);
    }
    emit(args.output.as_deref(), &emit_csv_all(&all))?;
    eprint!("{}", summary_table(&all));
    Ok(())
}

fn report(args: ReportArgs) -> Result<()> {
    let stats = parse_csv(&read(&args.csv)?)?;
    if stats.is_empty() {
        bail!("{} holds no instance rows", args.csv.display());
    }
    stdout(&summary_table(&stats))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Gen(a) => gen(a).map(|_| true),
        Command::Solve(a) => solve(a).map(|_| true),
        Command::Export(a) => export(a).map(|_| true),
        Command::Validate(a) => validate(a),
        Command::Bench(a) => bench(a).map(|_| true),
        Command::Report(a) => report(a).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_INFEASIBLE),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
