use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use altplan_core::probgen::{derive_seed, generate, GenDomain, GenSpec};
use altplan_core::routines::RoutineParams;
use altplan_core::sas::parse_task;
use altplan_core::scoring::Metric;
use altplan_core::search::{BudgetClock, BudgetMode, PlanOutcome};
use altplan_core::strategy::SearchFeature;
use altplan_core::task::Plan;
use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use altplan_cli::calibrate::{calibrate, CalibrateConfig};
use altplan_cli::config::{parse_budget_mode, TrainConfig};
use altplan_cli::evaluate::{evaluate, EvalConfig};
use altplan_cli::policy_file::PolicyFile;
use altplan_cli::report::{eval_csv, eval_text, train_log_csv};
use altplan_cli::runner::{run_validated, StrategySpec};
use altplan_cli::train::train;

// Exit codes of the `plan` subcommand. Input errors exit with 1 and clap
// usage errors with 2, as usual.
const EXIT_SOLVED: u8 = 0;
const EXIT_EXHAUSTED: u8 = 10;
const EXIT_TIMEOUT: u8 = 11;

#[derive(Parser)]
#[command(
    name = "altplan",
    about = "A forward-search planner that alternates between search routines \
             under a trainable selection policy",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate benchmark problems in the supported task format.
    Generate(GenerateArgs),
    /// Find a generator size with roughly the target GBFS solve rate.
    Calibrate(CalibrateArgs),
    /// Solve one task and write the plan.
    Plan(PlanArgs),
    /// Train a routine-selection policy.
    Train(TrainArgs),
    /// Score planners over a problem set.
    Evaluate(EvaluateArgs),
}

/// Budget and routine-parameter flags shared by the run-style subcommands.
#[derive(Args, Debug, Clone)]
struct RunOpts {
    /// wall: real time (default). expansions: deterministic node budget.
    #[arg(long, default_value = "wall")]
    budget_mode: String,
    /// Total budget per run in seconds (wall mode).
    #[arg(long, default_value_t = 5.0)]
    timeout_s: f64,
    /// Slice length in milliseconds (wall mode).
    #[arg(long, default_value_t = 100.0)]
    slice_ms: f64,
    /// Total budget per run in expansions (expansion mode).
    #[arg(long, default_value_t = 50_000)]
    timeout_expansions: u64,
    /// Slice length in expansions (expansion mode).
    #[arg(long, default_value_t = 300)]
    slice_expansions: u64,
    #[arg(long, default_value_t = 0.2)]
    epsilon: f64,
    #[arg(long, default_value_t = 5)]
    rw_stall_s: u32,
    #[arg(long, default_value_t = 20)]
    rw_walk_l: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl RunOpts {
    fn mode(&self) -> Result<BudgetMode> {
        parse_budget_mode(&self.budget_mode)
    }

    fn clock(&self) -> Result<BudgetClock> {
        Ok(match self.mode()? {
            BudgetMode::WallClock => BudgetClock::wall(self.timeout_s, self.slice_ms / 1000.0),
            BudgetMode::Expansions => {
                BudgetClock::expansions(self.timeout_expansions, self.slice_expansions)
            }
        })
    }

    fn params(&self) -> RoutineParams {
        RoutineParams {
            epsilon: self.epsilon,
            stall_s: self.rw_stall_s,
            walk_len_l: self.rw_walk_l,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// delivery, fuel-delivery or grid-paint.
    #[arg(long)]
    domain: String,
    #[arg(long)]
    size: u32,
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Fuel headroom factor (fuel-delivery only).
    #[arg(long, default_value_t = 1.5)]
    fuel_slack: f64,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long)]
    domain: String,
    #[arg(long, default_value_t = 20)]
    count: usize,
    #[arg(long, default_value_t = 0.5)]
    target: f64,
    #[arg(long, default_value_t = 2)]
    min_size: u32,
    /// 0 means the domain's upper size bound.
    #[arg(long, default_value_t = 0)]
    max_size: u32,
    #[arg(long, default_value_t = 2)]
    step: u32,
    #[arg(long, default_value_t = 1.5)]
    fuel_slack: f64,
    #[command(flatten)]
    run: RunOpts,
}

#[derive(Args)]
struct PlanArgs {
    /// Task file in the supported format.
    #[arg(long)]
    task: PathBuf,
    /// Routine name, `uniform`, or a policy-file path.
    #[arg(long, default_value = "gbfs")]
    strategy: String,
    /// Where to write the plan (only on success).
    #[arg(long, default_value = "sas_plan")]
    plan_out: PathBuf,
    #[command(flatten)]
    run: RunOpts,
}

#[derive(Args)]
struct TrainArgs {
    /// Key-value config file; command-line flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problems: Option<PathBuf>,
    /// ipc, ipc2 or time.
    #[arg(long)]
    reward: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    batch_n: Option<usize>,
    #[arg(long)]
    budget_mode: Option<String>,
    #[arg(long)]
    timeout_s: Option<f64>,
    #[arg(long)]
    slice_ms: Option<f64>,
    #[arg(long)]
    timeout_expansions: Option<u64>,
    #[arg(long)]
    slice_expansions: Option<u64>,
    #[arg(long)]
    train_seconds: Option<f64>,
    #[arg(long)]
    train_updates: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    rw_stall_s: Option<u32>,
    #[arg(long)]
    rw_walk_l: Option<u32>,
    #[arg(long)]
    ref_cache: Option<PathBuf>,
    /// Where to write the trained policy.
    #[arg(long, default_value = "policy.altplan")]
    policy_out: PathBuf,
    /// Where to write the per-update learning-curve log.
    #[arg(long)]
    log_out: Option<PathBuf>,
    /// Suppress progress lines on stderr.
    #[arg(long, default_value_t = false)]
    quiet: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    problems: PathBuf,
    /// Trained policy files to evaluate next to the built-in baselines
    /// (repeatable).
    #[arg(long = "policy")]
    policies: Vec<PathBuf>,
    /// Comma-separated subset of ipc,ipc2,time.
    #[arg(long, default_value = "ipc,ipc2,time")]
    metrics: String,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    /// Write the machine-readable score table here.
    #[arg(long)]
    csv_out: Option<PathBuf>,
    #[command(flatten)]
    run: RunOpts,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(args) => cmd_generate(args).map(|()| EXIT_SOLVED),
        Command::Calibrate(args) => cmd_calibrate(args).map(|()| EXIT_SOLVED),
        Command::Plan(args) => cmd_plan(args),
        Command::Train(args) => cmd_train(args).map(|()| EXIT_SOLVED),
        Command::Evaluate(args) => cmd_evaluate(args).map(|()| EXIT_SOLVED),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let domain = GenDomain::parse(&args.domain)
        .ok_or_else(|| anyhow!("unknown domain `{}`", args.domain))?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    for k in 0..args.count {
        let spec = GenSpec::new(domain, args.size, derive_seed(args.seed, k))
            .with_fuel_slack(args.fuel_slack);
        let text = generate(&spec)?;
        let name = format!("{}-{}-{}-{}.sas", domain.name(), args.size, args.seed, k);
        fs::write(args.out.join(&name), text)
            .with_context(|| format!("writing {name}"))?;
    }
    println!("wrote {} {} task(s) of size {} to {}", args.count, domain.name(), args.size, args.out.display());
    Ok(())
}

fn cmd_calibrate(args: CalibrateArgs) -> Result<()> {
    let domain = GenDomain::parse(&args.domain)
        .ok_or_else(|| anyhow!("unknown domain `{}`", args.domain))?;
    let cfg = CalibrateConfig {
        domain,
        fuel_slack: args.fuel_slack,
        budget_mode: args.run.mode()?,
        timeout_s: args.run.timeout_s,
        slice_ms: args.run.slice_ms,
        timeout_expansions: args.run.timeout_expansions,
        slice_expansions: args.run.slice_expansions,
        count: args.count,
        seed: args.run.seed,
        target_rate: args.target,
        min_size: args.min_size,
        max_size: args.max_size,
        step: args.step,
        params: args.run.params(),
    };
    let (rows, chosen) = calibrate(&cfg)?;
    for row in &rows {
        println!("size {:>3}: solved {}/{} (rate {:.2})", row.size, row.solved, row.count, row.rate());
    }
    println!("chosen size: {chosen}");
    Ok(())
}

fn render_plan(task: &altplan_core::task::Task, plan: &Plan) -> String {
    let mut out = String::new();
    for &step in &plan.steps {
        out.push('(');
        out.push_str(&task.operators[step].name);
        out.push_str(")\n");
    }
    out.push_str(&format!("; cost = {}\n", plan.cost));
    out
}

fn cmd_plan(args: PlanArgs) -> Result<u8> {
    let text = fs::read_to_string(&args.task)
        .with_context(|| format!("reading task {}", args.task.display()))?;
    let task = parse_task(&text).map_err(|e| anyhow!("{}: {e}", args.task.display()))?;
    let strategy = StrategySpec::parse(&args.strategy)?;
    let clock = args.run.clock()?;
    let params = args.run.params();

    let (result, report) = run_validated(&task, &strategy, clock, &params, args.run.seed)?;

    let outcome_name = match report.outcome {
        PlanOutcome::Solved(_) => "solved",
        PlanOutcome::Exhausted => "exhausted",
        PlanOutcome::Timeout => "timeout",
    };
    println!("outcome: {outcome_name}");
    println!("expansions: {}", report.stats.expansions);
    println!("generated: {}", report.stats.generated);
    println!("walks: {}", report.stats.walks);
    let unit = match args.run.mode()? {
        BudgetMode::WallClock => "s",
        BudgetMode::Expansions => "expansions",
    };
    println!("time: {} {unit}", report.episode.time_used);
    if let Some(cost) = result.cost {
        println!("cost: {cost}");
    }
    if let PlanOutcome::Solved(plan) = &report.outcome {
        println!("plan-length: {}", plan.len());
        fs::write(&args.plan_out, render_plan(&task, plan))
            .with_context(|| format!("writing plan {}", args.plan_out.display()))?;
        println!("plan written to {}", args.plan_out.display());
    }
    let trace: Vec<String> = report
        .routine_trace
        .iter()
        .map(|(feature, routine)| format!("{}:{}", feature.label(), routine.name()))
        .collect();
    println!("trace: {}", trace.join(" "));

    Ok(match report.outcome {
        PlanOutcome::Solved(_) => EXIT_SOLVED,
        PlanOutcome::Exhausted => EXIT_EXHAUSTED,
        PlanOutcome::Timeout => EXIT_TIMEOUT,
    })
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            TrainConfig::from_file_text(&text)?
        }
        None => TrainConfig::default(),
    };
    if let Some(v) = args.problems {
        cfg.problems = v;
    }
    if let Some(v) = &args.reward {
        cfg.reward = Metric::parse(v).ok_or_else(|| anyhow!("unknown reward `{v}`"))?;
    }
    if let Some(v) = args.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = args.batch_n {
        cfg.batch_n = v;
    }
    if let Some(v) = &args.budget_mode {
        cfg.budget_mode = parse_budget_mode(v)?;
    }
    if let Some(v) = args.timeout_s {
        cfg.timeout_s = v;
    }
    if let Some(v) = args.slice_ms {
        cfg.slice_ms = v;
    }
    if let Some(v) = args.timeout_expansions {
        cfg.timeout_expansions = v;
    }
    if let Some(v) = args.slice_expansions {
        cfg.slice_expansions = v;
    }
    if let Some(v) = args.train_seconds {
        cfg.train_seconds = Some(v);
    }
    if let Some(v) = args.train_updates {
        cfg.train_updates = Some(v);
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.epsilon {
        cfg.params.epsilon = v;
    }
    if let Some(v) = args.rw_stall_s {
        cfg.params.stall_s = v;
    }
    if let Some(v) = args.rw_walk_l {
        cfg.params.walk_len_l = v;
    }
    if let Some(v) = args.ref_cache {
        cfg.ref_cache = Some(v);
    }

    let output = train(&cfg, args.quiet)?;
    output.policy.save(&args.policy_out)?;
    println!(
        "trained for {} update(s) over {} episode(s); {} batch(es) had no defined reward",
        output.updates, output.episodes, output.skipped_batches
    );
    println!("policy written to {}", args.policy_out.display());
    if let Some(path) = args.log_out {
        fs::write(&path, train_log_csv(&output.log))
            .with_context(|| format!("writing log {}", path.display()))?;
        println!("training log written to {}", path.display());
    }

    let loaded = PolicyFile::load(&args.policy_out)?;
    let policy = altplan_core::strategy::Policy::from_theta(loaded.theta, 0);
    println!("final action probabilities:");
    for state in SearchFeature::all() {
        let probs = policy.action_probs(state);
        let cells: Vec<String> = altplan_core::routines::RoutineId::ALL
            .iter()
            .map(|r| format!("{}={:.3}", r.name(), probs[r.index()]))
            .collect();
        println!("  {:<11} {}", state.label(), cells.join(" "));
    }
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let mut metrics = Vec::new();
    for name in args.metrics.split(',') {
        let name = name.trim();
        if name.is_empty() {
            continue;
        }
        metrics.push(Metric::parse(name).ok_or_else(|| anyhow!("unknown metric `{name}`"))?);
    }
    if metrics.is_empty() {
        bail!("no metrics requested");
    }
    let cfg = EvalConfig {
        problems: args.problems,
        policies: args.policies,
        metrics,
        repeats: args.repeats,
        budget_mode: args.run.mode()?,
        timeout_s: args.run.timeout_s,
        slice_ms: args.run.slice_ms,
        timeout_expansions: args.run.timeout_expansions,
        slice_expansions: args.run.slice_expansions,
        seed: args.run.seed,
        params: args.run.params(),
    };
    let output = evaluate(&cfg)?;
    print!("{}", eval_text(&output));
    if let Some(path) = args.csv_out {
        fs::write(&path, eval_csv(&output))
            .with_context(|| format!("writing scores {}", path.display()))?;
        println!("scores written to {}", path.display());
    }
    Ok(())
}
