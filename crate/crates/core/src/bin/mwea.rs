//! Command-line driver for the master-worker optimizer and its analysis
//! tools. Configuration resolves in three layers: built-in defaults, an
//! optional TOML file, then command-line overrides; the hash of the resolved
//! config is stamped into every output file.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{ArgAction, Args, Parser, Subcommand};
use mwea::analysis::{feature_performance_study, run_grid, AnalysisError, GridResult, StudyResult};
use mwea::config::{AppConfig, ConfigError};
use mwea::engine::{run_ea, sync_compare, EngineError, LocalTransport, SimTransport};
use mwea::export;
use mwea::landscape::{features_with_mode, random_walk_with_mode, LandscapeError, WalkMode};
use mwea::problems::FitnessProblem;
use thiserror::Error;

const OUT_DIR_ENV: &str = "MWEA_OUT_DIR";

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Landscape(#[from] LandscapeError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Parser)]
#[command(
    name = "mwea",
    version,
    about = "Asynchronous master-worker evolutionary optimizer for expensive integer problems, \
             with random-walk landscape analysis and a simulated worker farm"
)]
struct Cli {
    /// Raise log verbosity (-v info, -vv debug with dispatch/receive events, -vvv trace).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,

    /// TOML config file; built-in defaults when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory; overrides the MWEA_OUT_DIR variable, defaults to ./mwea-out.
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the asynchronous optimizer and write trace, best, and summary files.
    Optimize(OptimizeArgs),
    /// Sample a random walk and estimate landscape features.
    Walk(WalkArgs),
    /// Run the mutation-parameter grid and the feature-performance study.
    Grid(GridArgs),
    /// Run asynchronous and round-based scheduling on identical simulated farms.
    SyncCompare(SyncCompareArgs),
}

#[derive(Args)]
struct ProblemOverrides {
    /// Problem to optimize: load-follow, nk, or quadratic.
    #[arg(long)]
    problem: Option<String>,

    /// Fitness plateau grain; 0 disables quantization. Switching --problem
    /// away from load-follow resets it to 0 unless given explicitly.
    #[arg(long)]
    grain: Option<f64>,

    /// Bit count of the nk problem.
    #[arg(long)]
    nk_n: Option<usize>,

    /// Epistasis degree of the nk problem.
    #[arg(long)]
    nk_k: Option<usize>,

    /// Interaction-table seed of the nk problem.
    #[arg(long)]
    nk_seed: Option<u64>,
}

#[derive(Args)]
struct MutationOverrides {
    /// Per-coordinate mutation probability.
    #[arg(long)]
    p: Option<f64>,

    /// Mutation step radius as a fraction of each variable's range.
    #[arg(long)]
    r: Option<f64>,
}

#[derive(Args)]
struct EngineOverrides {
    /// Worker count: one master plus workers-1 evaluators.
    #[arg(long)]
    workers: Option<usize>,

    /// Virtual wall-clock budget in hours.
    #[arg(long)]
    virtual_hours: Option<f64>,

    /// Budget by received results; lifts the time limit unless
    /// --virtual-hours is also given.
    #[arg(long)]
    max_evaluations: Option<u64>,

    /// Probability that a dispatched evaluation crashes.
    #[arg(long)]
    crash_probability: Option<f64>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    problem: ProblemOverrides,
    #[command(flatten)]
    mutation: MutationOverrides,
    #[command(flatten)]
    engine: EngineOverrides,

    /// Optimizer seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Evaluate on real local threads instead of the simulated farm.
    /// Arrival order then depends on the host scheduler, so traces are not
    /// reproducible.
    #[arg(long)]
    local: bool,
}

#[derive(Args)]
struct WalkArgs {
    #[command(flatten)]
    problem: ProblemOverrides,
    #[command(flatten)]
    mutation: MutationOverrides,

    /// Walk length (number of sampled candidates).
    #[arg(long)]
    length: Option<usize>,

    /// Walk seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Require every step to differ from all earlier samples instead of
    /// only the previous one.
    #[arg(long)]
    globally_distinct: bool,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    problem: ProblemOverrides,
    #[command(flatten)]
    engine: EngineOverrides,

    /// Comma-separated mutation probabilities for the grid rows.
    #[arg(long, value_delimiter = ',')]
    p_values: Option<Vec<f64>>,

    /// Comma-separated step radii for the grid columns.
    #[arg(long, value_delimiter = ',')]
    r_values: Option<Vec<f64>>,

    /// Repeats per cell; repeat k of every cell shares seed base+k.
    #[arg(long)]
    repeats: Option<usize>,

    /// Base seed for the paired repeats.
    #[arg(long)]
    seed: Option<u64>,

    /// Random-walk length for the feature estimates.
    #[arg(long)]
    walk_length: Option<usize>,

    /// Seed shared by all feature walks.
    #[arg(long)]
    walk_seed: Option<u64>,
}

#[derive(Args)]
struct SyncCompareArgs {
    #[command(flatten)]
    problem: ProblemOverrides,
    #[command(flatten)]
    mutation: MutationOverrides,
    #[command(flatten)]
    engine: EngineOverrides,

    /// Optimizer seed shared by both runs.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let base = match &cli.config {
        Some(path) => AppConfig::load(path)?,
        None => AppConfig::default(),
    };
    let out_dir = resolve_out_dir(cli.out_dir.as_deref());
    match cli.command {
        Command::Optimize(args) => cmd_optimize(base, out_dir, args),
        Command::Walk(args) => cmd_walk(base, out_dir, args),
        Command::Grid(args) => cmd_grid(base, out_dir, args),
        Command::SyncCompare(args) => cmd_sync_compare(base, out_dir, args),
    }
}

fn resolve_out_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(dir) = flag {
        return dir.to_path_buf();
    }
    match std::env::var(OUT_DIR_ENV) {
        Ok(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => PathBuf::from("mwea-out"),
    }
}

fn apply_problem(cfg: &mut AppConfig, o: &ProblemOverrides) {
    if let Some(name) = &o.problem {
        if name != "load-follow" && o.grain.is_none() {
            cfg.problem.quantize_grain = 0.0;
        }
        cfg.problem.name = name.clone();
    }
    if let Some(grain) = o.grain {
        cfg.problem.quantize_grain = grain;
    }
    if let Some(n) = o.nk_n {
        cfg.problem.nk_n = n;
    }
    if let Some(k) = o.nk_k {
        cfg.problem.nk_k = k;
    }
    if let Some(seed) = o.nk_seed {
        cfg.problem.nk_seed = seed;
    }
}

fn apply_mutation(cfg: &mut AppConfig, o: &MutationOverrides) {
    if let Some(p) = o.p {
        cfg.mutation.p = p;
    }
    if let Some(r) = o.r {
        cfg.mutation.r = r;
    }
}

fn apply_engine(cfg: &mut AppConfig, o: &EngineOverrides) {
    if let Some(workers) = o.workers {
        cfg.engine.workers = workers;
    }
    if let Some(hours) = o.virtual_hours {
        cfg.engine.virtual_hours = hours;
    }
    if let Some(cap) = o.max_evaluations {
        cfg.engine.max_evaluations = Some(cap);
        if o.virtual_hours.is_none() {
            cfg.engine.virtual_hours = f64::INFINITY;
        }
    }
    if let Some(prob) = o.crash_probability {
        cfg.engine.crash_probability = prob;
    }
}

/// Validates the resolved config, then creates the output directory. Nothing
/// is written before both succeed.
fn prepare(cfg: &AppConfig, out_dir: &Path) -> Result<(String, Box<dyn FitnessProblem>), CliError> {
    cfg.validate()?;
    let hash = cfg.config_hash()?;
    let problem = cfg.build_problem()?;
    std::fs::create_dir_all(out_dir).map_err(|source| CliError::Write {
        path: out_dir.display().to_string(),
        source,
    })?;
    Ok((hash, problem))
}

fn emit(
    out_dir: &Path,
    name: &str,
    write: impl FnOnce(&Path) -> std::io::Result<()>,
) -> Result<PathBuf, CliError> {
    let path = out_dir.join(name);
    write(&path).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path)
}

fn cmd_optimize(mut cfg: AppConfig, out_dir: PathBuf, args: OptimizeArgs) -> Result<(), CliError> {
    apply_problem(&mut cfg, &args.problem);
    apply_mutation(&mut cfg, &args.mutation);
    apply_engine(&mut cfg, &args.engine);
    if let Some(seed) = args.seed {
        cfg.engine.seed = seed;
    }
    let (hash, problem) = prepare(&cfg, &out_dir)?;
    let run_cfg = cfg.run_config()?;
    log::info!("optimizing {} with {} workers, seed {}", problem.name(), run_cfg.workers, run_cfg.seed);

    let problem: Arc<dyn FitnessProblem> = Arc::from(problem);
    let trace = if args.local {
        let mut transport = LocalTransport::new(Arc::clone(&problem), run_cfg.workers - 1)?;
        run_ea(&run_cfg, problem.as_ref(), &mut transport)?
    } else {
        let mut transport = SimTransport::from_config(&run_cfg, problem.as_ref())?;
        run_ea(&run_cfg, problem.as_ref(), &mut transport)?
    };

    let trace_path = emit(&out_dir, "trace.csv", |p| export::write_trace_csv(p, &trace, &hash))?;
    let best_path = emit(&out_dir, "best.csv", |p| {
        export::write_best_csv(p, &trace, problem.bounds().names(), &hash)
    })?;
    let summary_path = emit(&out_dir, "summary.csv", |p| {
        export::write_summary_csv(p, &trace, &run_cfg, problem.reference_fitness(), &hash)
    })?;
    let plot_path = emit(&out_dir, "trace.gnuplot", |p| export::write_trace_plot(p, "trace.csv"))?;

    println!("problem: {}", trace.problem_name);
    println!("config hash: {hash}");
    println!(
        "received results: {} ({} completed, {} crashed)",
        trace.rows.len(),
        trace.completed_evaluations(),
        trace.crash_count
    );
    match &trace.best {
        Some((_, fitness)) => println!("best fitness: {fitness}"),
        None => println!("best fitness: none (no evaluation completed)"),
    }
    println!("final virtual time: {} s", trace.final_time_s);
    for path in [&trace_path, &best_path, &summary_path, &plot_path] {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_walk(mut cfg: AppConfig, out_dir: PathBuf, args: WalkArgs) -> Result<(), CliError> {
    apply_problem(&mut cfg, &args.problem);
    apply_mutation(&mut cfg, &args.mutation);
    if let Some(length) = args.length {
        cfg.analysis.walk_length = length;
    }
    if let Some(seed) = args.seed {
        cfg.analysis.walk_seed = seed;
    }
    let (hash, problem) = prepare(&cfg, &out_dir)?;
    let m = cfg.mutation_params()?;
    let mode = if args.globally_distinct {
        WalkMode::GloballyDistinct
    } else {
        WalkMode::ConsecutiveDistinct
    };
    let length = cfg.analysis.walk_length;
    let seed = cfg.analysis.walk_seed;
    log::info!("walking {} for {length} steps, seed {seed}", problem.name());

    let walk = random_walk_with_mode(problem.as_ref(), m, length, seed, mode)?;
    let features = features_with_mode(problem.as_ref(), m, length, seed, mode)?;

    let walk_path = emit(&out_dir, "walk.csv", |p| {
        export::write_walk_csv(p, &walk, problem.bounds().names(), &hash)
    })?;
    let features_path = emit(&out_dir, "features.csv", |p| {
        export::write_features_csv(p, &features, &hash)
    })?;
    let plot_path = emit(&out_dir, "walk.gnuplot", |p| export::write_walk_plot(p, "walk.csv"))?;

    println!("problem: {}", walk.problem_name);
    println!("config hash: {hash}");
    println!(
        "walk length {}: nr = {}, tau = {}, epsilon = {}",
        features.length,
        features.nr,
        match features.tau {
            Some(tau) if features.tau_saturated => format!("{tau} (saturated)"),
            Some(tau) => tau.to_string(),
            None => "undefined (constant walk)".to_string(),
        },
        features.epsilon
    );
    for path in [&walk_path, &features_path, &plot_path] {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_grid(mut cfg: AppConfig, out_dir: PathBuf, args: GridArgs) -> Result<(), CliError> {
    apply_problem(&mut cfg, &args.problem);
    apply_engine(&mut cfg, &args.engine);
    if let Some(values) = args.p_values {
        cfg.analysis.p_values = values;
    }
    if let Some(values) = args.r_values {
        cfg.analysis.r_values = values;
    }
    if let Some(repeats) = args.repeats {
        cfg.analysis.repeats = repeats;
    }
    if let Some(seed) = args.seed {
        cfg.analysis.base_seed = seed;
    }
    if let Some(length) = args.walk_length {
        cfg.analysis.walk_length = length;
    }
    if let Some(seed) = args.walk_seed {
        cfg.analysis.walk_seed = seed;
    }
    let (hash, problem) = prepare(&cfg, &out_dir)?;
    let run_cfg = cfg.run_config()?;
    let a = cfg.analysis.clone();
    log::info!(
        "grid over {} p values x {} r values, {} repeats",
        a.p_values.len(),
        a.r_values.len(),
        a.repeats
    );

    let grid = run_grid(problem.as_ref(), &a.p_values, &a.r_values, a.repeats, a.base_seed, &run_cfg)?;
    let study = feature_performance_study(problem.as_ref(), &grid, a.walk_length, a.walk_seed)?;

    let runs_path = emit(&out_dir, "grid_runs.csv", |p| export::write_grid_runs_csv(p, &grid, &hash))?;
    let cells_path =
        emit(&out_dir, "grid_cells.csv", |p| export::write_grid_cells_csv(p, &grid, &hash))?;
    let study_path = emit(&out_dir, "study.csv", |p| export::write_study_csv(p, &study, &hash))?;
    let reports_path = emit(&out_dir, "study_reports.csv", |p| {
        export::write_study_reports_csv(p, &study, &hash)
    })?;
    let plot_path = emit(&out_dir, "study.gnuplot", |p| export::write_study_plot(p, "study.csv"))?;

    println!("problem: {}", problem.name());
    println!("config hash: {hash}");
    print_grid_tables(&grid);
    print_study(&study);
    for path in [&runs_path, &cells_path, &study_path, &reports_path, &plot_path] {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn print_grid_tables(grid: &GridResult) {
    println!("mean normalized best fitness (rows p, columns r):");
    print!("{:>8}", "");
    for r in &grid.r_values {
        print!("{:>12}", format!("r={r}"));
    }
    println!();
    for (i, p) in grid.p_values.iter().enumerate() {
        print!("{:>8}", format!("p={p}"));
        for j in 0..grid.r_values.len() {
            match grid.cell(i, j).mean {
                Some(mean) => print!("{:>12.5}", mean),
                None => print!("{:>12}", "-"),
            }
        }
        println!();
    }
    println!("mean rank over paired seeds (rank 1 is best):");
    print!("{:>8}", "");
    for r in &grid.r_values {
        print!("{:>12}", format!("r={r}"));
    }
    println!();
    for (i, p) in grid.p_values.iter().enumerate() {
        print!("{:>8}", format!("p={p}"));
        for j in 0..grid.r_values.len() {
            match grid.cell(i, j).mean_rank {
                Some(rank) => print!("{:>12.3}", rank),
                None => print!("{:>12}", "-"),
            }
        }
        println!();
    }
    if !grid.complete {
        println!("warning: some runs produced no result; ranks cover the available settings only");
    }
}

fn print_study(study: &StudyResult) {
    for (feature, report) in [("nr", &study.nr_report), ("tau", &study.tau_report)] {
        println!(
            "{feature} vs performance: pearson = {:.4}, spearman = {:.4}, r² = {:.4}{}",
            report.pearson,
            report.spearman,
            report.r_squared,
            if report.degenerate { " (degenerate)" } else { "" }
        );
    }
    if study.incomplete_features {
        println!("warning: settings with undefined tau were left out of the tau report");
    }
}

fn cmd_sync_compare(mut cfg: AppConfig, out_dir: PathBuf, args: SyncCompareArgs) -> Result<(), CliError> {
    apply_problem(&mut cfg, &args.problem);
    apply_mutation(&mut cfg, &args.mutation);
    apply_engine(&mut cfg, &args.engine);
    if let Some(seed) = args.seed {
        cfg.engine.seed = seed;
    }
    let (hash, problem) = prepare(&cfg, &out_dir)?;
    let run_cfg = cfg.run_config()?;
    log::info!("comparing schedulers on {} with {} workers", problem.name(), run_cfg.workers);

    let (async_trace, sync_trace) = sync_compare(&run_cfg, problem.as_ref())?;

    let path = emit(&out_dir, "sync_compare.csv", |p| {
        export::write_sync_compare_csv(p, &async_trace, &sync_trace, &hash)
    })?;

    println!("problem: {}", async_trace.problem_name);
    println!("config hash: {hash}");
    for (mode, trace) in [("async", &async_trace), ("sync", &sync_trace)] {
        let best = trace
            .best
            .as_ref()
            .map(|(_, f)| f.to_string())
            .unwrap_or_else(|| "none".to_string());
        println!(
            "{mode:>5}: {} results, {} crashes, best fitness {best}",
            trace.rows.len(),
            trace.crash_count
        );
    }
    println!("wrote {}", path.display());
    Ok(())
}
