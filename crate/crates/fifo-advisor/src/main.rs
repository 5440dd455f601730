// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use fifo_advisor::report::{self, Baselines, RunRecord};
use fifo_advisor::{generate_suite, parse_config, parse_trace, write_trace, Parallel};
use fifo_advisor_core::benchgen::{self, BenchSpec, Pattern};
use fifo_advisor_core::optimize::{baseline_max, baseline_min, AnnealSchedule, Optimizer, SearchBudget};
use fifo_advisor_core::{memory, simulate, TimingMode, TraceProgram};
use serde::ser::{Serialize, SerializeMap, Serializer};

/// Exit status classes.
enum CliError {
    Io(String),
    Validation(String),
    Usage(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Usage(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Io(m) | CliError::Validation(m) | CliError::Usage(m) => m,
        }
    }
}

fn io_error(path: &Path, err: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {err}", path.display()))
}

#[derive(Parser)]
#[command(name = "fifo-advisor", version, about = "FIFO depth design-space exploration for dataflow traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a trace file and summarize its tasks and FIFOs.
    Validate { trace: PathBuf },
    /// Replay a trace under one depth configuration and print JSON stats.
    #[command(group(ArgGroup::new("depths").required(true).args(["config", "baseline"])))]
    Simulate {
        trace: PathBuf,
        /// JSON file of the form {"depths": {"<fifo>": <depth>}}.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        baseline: Option<BaselineArg>,
        #[arg(long, value_enum, default_value_t = ModeArg::Uniform)]
        mode: ModeArg,
    },
    /// Print each FIFO's candidate depths as JSON.
    Breakpoints { trace: PathBuf },
    /// Search for latency/BRAM Pareto frontiers and write reports.
    Optimize(OptimizeArgs),
    /// Write the benchmark suite, or a single generated trace.
    Benchgen(BenchgenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineArg {
    Max,
    Min,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Uniform,
    DepthAware,
}

impl From<ModeArg> for TimingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Uniform => TimingMode::Uniform,
            ModeArg::DepthAware => TimingMode::DepthAware,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OptimizerArg {
    Random,
    GroupedRandom,
    Sa,
    GroupedSa,
    Greedy,
    All,
}

impl OptimizerArg {
    fn expand(self) -> Vec<Optimizer> {
        match self {
            OptimizerArg::Random => vec![Optimizer::Random],
            OptimizerArg::GroupedRandom => vec![Optimizer::GroupedRandom],
            OptimizerArg::Sa => vec![Optimizer::SimulatedAnnealing],
            OptimizerArg::GroupedSa => vec![Optimizer::GroupedSimulatedAnnealing],
            OptimizerArg::Greedy => vec![Optimizer::Greedy],
            OptimizerArg::All => Optimizer::ALL.to_vec(),
        }
    }
}

#[derive(Args)]
struct OptimizeArgs {
    trace: PathBuf,
    #[arg(long, value_enum, default_value_t = OptimizerArg::All)]
    optimizer: OptimizerArg,
    /// Maximum simulations per optimizer.
    #[arg(long, default_value_t = 1000)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of annealing chains (β values).
    #[arg(long, default_value_t = SearchBudget::default().beta_count)]
    beta_count: usize,
    /// Greedy latency slack over Baseline-Max.
    #[arg(long, default_value_t = SearchBudget::default().epsilon)]
    epsilon: f64,
    /// Latency weight of the highlight score.
    #[arg(long, default_value_t = 0.7)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Uniform)]
    mode: ModeArg,
    /// Anneal on raw cycles and BRAM counts instead of baseline ratios.
    #[arg(long)]
    raw_scalarization: bool,
    /// Annealing start temperature, on the scale of the scalarized objective.
    #[arg(long, default_value_t = AnnealSchedule::default().initial_temperature)]
    initial_temperature: f64,
    /// Temperature factor applied every --steps-per-temperature steps.
    #[arg(long, default_value_t = AnnealSchedule::default().cooling)]
    cooling: f64,
    #[arg(long, default_value_t = AnnealSchedule::default().steps_per_temperature)]
    steps_per_temperature: usize,
    /// Evaluation workers; 0 uses all available cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, default_value = "fifo-advisor-out")]
    out: PathBuf,
}

#[derive(Args)]
struct BenchgenArgs {
    /// Suite directory, or the output file with --pattern (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pattern: Option<PatternArg>,
    #[arg(long, default_value_t = 3)]
    stages: usize,
    #[arg(long, default_value_t = 1)]
    fanout: usize,
    #[arg(long, default_value_t = 16)]
    tokens: usize,
    /// Comma-separated bit-widths, assigned round-robin.
    #[arg(long, value_delimiter = ',', default_value = "32")]
    widths: Vec<u32>,
    /// Compute cycles between channel ops, as `min,max`.
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0, 3])]
    jitter: Vec<u64>,
    /// Token count of the write-then-read pattern.
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Put stage-parallel FIFOs in shared groups.
    #[arg(long)]
    grouping: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PatternArg {
    Chain,
    Tree,
    WriteThenRead,
    Ring,
    RandomDag,
}

/// Name-keyed JSON object that keeps insertion order.
struct Ordered<'a, T>(Vec<(&'a str, T)>);

impl<T: Serialize> Serialize for Ordered<'_, T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

fn load_trace(path: &Path) -> Result<TraceProgram, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    parse_trace(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| io_error(path, e))
}

fn cmd_validate(trace: &Path) -> Result<(), CliError> {
    let p = load_trace(trace)?;
    println!("{}: {} tasks, {} fifos, {} events", p.name(), p.task_count(), p.fifo_count(), p.event_count());
    for f in p.fifos() {
        println!(
            "  fifo {} {}: width {}, writes {}, reads {}, upper bound {}, group {}",
            f.id,
            f.name,
            f.width,
            p.write_count(f.id),
            p.read_count(f.id),
            p.upper_bound(f.id),
            f.group.as_deref().unwrap_or("-"),
        );
    }
    Ok(())
}

fn cmd_simulate(
    trace: &Path,
    config: Option<&Path>,
    baseline: Option<BaselineArg>,
    mode: TimingMode,
) -> Result<(), CliError> {
    let p = load_trace(trace)?;
    let cfg = match (config, baseline) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            parse_config(&p, &text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
        }
        (None, Some(BaselineArg::Max)) => baseline_max(&p),
        (None, Some(BaselineArg::Min)) => baseline_min(&p),
        (None, None) => unreachable!("clap requires one of --config / --baseline"),
    };
    let result = simulate(&p, &cfg, mode).map_err(|e| CliError::Validation(e.to_string()))?;
    print!("{}", report::simulation_json(&p, &cfg, &result, mode));
    if result.deadlocked {
        eprintln!("deadlocked at cycle {}", result.latency);
    }
    Ok(())
}

fn cmd_breakpoints(trace: &Path) -> Result<(), CliError> {
    let p = load_trace(trace)?;
    let map = Ordered(
        p.fifos()
            .iter()
            .zip(memory::program_breakpoints(&p))
            .map(|(f, c)| (f.name.as_str(), c))
            .collect(),
    );
    println!("{}", serde_json::to_string_pretty(&map).expect("json"));
    Ok(())
}

fn optimize_budget(a: &OptimizeArgs) -> Result<SearchBudget, CliError> {
    let usage = |m: &str| Err(CliError::Usage(m.to_string()));
    if a.budget == 0 {
        return usage("--budget must be at least 1");
    }
    if !(0.0..=1.0).contains(&a.alpha) {
        return usage("--alpha must lie in [0, 1]");
    }
    if !(a.epsilon >= 0.0) || !a.epsilon.is_finite() {
        return usage("--epsilon must be a non-negative number");
    }
    if a.beta_count == 0 || a.beta_count > a.budget {
        return usage("--beta-count must be between 1 and --budget");
    }
    if !(a.initial_temperature >= 0.0) || !(a.cooling > 0.0 && a.cooling <= 1.0) {
        return usage("annealing needs --initial-temperature >= 0 and --cooling in (0, 1]");
    }
    Ok(SearchBudget {
        max_evaluations: a.budget,
        seed: a.seed,
        beta_count: a.beta_count,
        epsilon: a.epsilon,
        schedule: AnnealSchedule {
            initial_temperature: a.initial_temperature,
            cooling: a.cooling,
            steps_per_temperature: a.steps_per_temperature.max(1),
        },
        raw_scalarization: a.raw_scalarization,
    })
}

fn cmd_optimize(a: &OptimizeArgs) -> Result<(), CliError> {
    let budget = optimize_budget(a)?;
    let p = load_trace(&a.trace)?;
    let mode = TimingMode::from(a.mode);
    let evaluator = Parallel::new(a.jobs).map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    log::info!("{} evaluation workers", evaluator.jobs());

    let baselines = Baselines::evaluate(&p, mode).map_err(|e| CliError::Validation(e.to_string()))?;
    let mut runs = Vec::new();
    for opt in a.optimizer.expand() {
        let start = Instant::now();
        let outcome = opt
            .run(&p, &budget, mode, &evaluator)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        eprintln!(
            "{}: {} evaluations in {:.3} s",
            opt.name(),
            outcome.evaluations.len(),
            start.elapsed().as_secs_f64()
        );
        if outcome.frontier.is_empty() {
            log::warn!("{}: every evaluated configuration deadlocked", opt.name());
            eprintln!("warning: {} found no deadlock-free configuration", opt.name());
        }
        runs.push(RunRecord { optimizer: opt, outcome });
    }

    fs::create_dir_all(&a.out).map_err(|e| io_error(&a.out, e))?;
    let mut rows = Vec::new();
    for run in &runs {
        let path = a.out.join(format!("{}.frontier.json", run.optimizer.name()));
        write_file(&path, &report::frontier_json(&p, mode, a.alpha, &baselines, run))?;
        println!("{}", path.display());
        rows.push(report::summarize(&baselines, run, a.alpha));
    }
    let log_path = a.out.join("evaluations.csv");
    let log = report::evaluation_log_csv(&p, &runs).map_err(|e| io_error(&log_path, e))?;
    write_file(&log_path, &log)?;
    println!("{}", log_path.display());
    let summary_path = a.out.join("summary.csv");
    let summary = report::summary_csv(&rows).map_err(|e| io_error(&summary_path, e))?;
    write_file(&summary_path, &summary)?;
    println!("{}", summary_path.display());
    eprint!("{}", report::summary_table(&baselines, &rows));
    Ok(())
}

fn cmd_benchgen(a: &BenchgenArgs) -> Result<(), CliError> {
    let Some(pattern) = a.pattern else {
        let out = a
            .out
            .as_deref()
            .ok_or_else(|| CliError::Usage("benchgen needs --out <dir> or --pattern".into()))?;
        for path in generate_suite(out).map_err(|e| io_error(out, e))? {
            println!("{}", path.display());
        }
        return Ok(());
    };
    let spec = BenchSpec {
        pattern: match pattern {
            PatternArg::Chain => Pattern::Chain,
            PatternArg::Tree => Pattern::Tree,
            PatternArg::WriteThenRead => Pattern::WriteThenRead,
            PatternArg::Ring => Pattern::Ring,
            PatternArg::RandomDag => Pattern::RandomDag,
        },
        stages: a.stages,
        fanout: a.fanout,
        tokens: a.tokens,
        widths: a.widths.clone(),
        compute_jitter: (a.jitter[0], a.jitter[1]),
        n: a.n,
        seed: a.seed,
        grouping: a.grouping,
    };
    let program = benchgen::generate(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
    let text = write_trace(&program);
    match &a.out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { trace } => cmd_validate(&trace),
        Command::Simulate {
            trace,
            config,
            baseline,
            mode,
        } => cmd_simulate(&trace, config.as_deref(), baseline, mode.into()),
        Command::Breakpoints { trace } => cmd_breakpoints(&trace),
        Command::Optimize(args) => cmd_optimize(&args),
        Command::Benchgen(args) => cmd_benchgen(&args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FIFO_ADVISOR_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
