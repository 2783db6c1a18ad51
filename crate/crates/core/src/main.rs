use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use rsma_mec::analytics::PsBreakdown;
use rsma_mec::experiment::{
    emit_results, parse_scheme_list, run_experiment, ExperimentConfig, OutputFormat, SchemeSpec, SweepAxis,
};
use rsma_mec::optimizer::{execution_times, grid_search_oracle, plan_ps, ExecutionTimes, GridObjective};
use rsma_mec::{optimal_offload_plan, Error, OffloadPlan, SystemParams};

#[derive(Parser)]
#[command(
    name = "rsma-mec",
    version,
    about = "Rate-splitting cognitive-radio offloading simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form success probability only
    Analytic(RunArgs),
    /// Monte Carlo estimate at the configured scenario
    Simulate(RunArgs),
    /// Latency-optimal offloading plan as a JSON record
    Optimize(OptimizeArgs),
    /// Parameter sweep
    Sweep(RunArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML experiment configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write results here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads (results do not depend on this)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Comma-separated: RSMA, NOMA_PU_first, NOMA_SU_first, analytic
    #[arg(long)]
    scheme: Option<String>,
    /// task_length, power, latency_study or point
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Also run the exhaustive grid search at this resolution
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Serialize)]
struct OptimizeRecord {
    params: SystemParams,
    feasible: bool,
    plan: Option<OffloadPlan>,
    execution_times: Option<ExecutionTimes>,
    ps: Option<PsBreakdown>,
    diagnostics: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<GridRecord>,
}

#[derive(Serialize)]
struct GridRecord {
    resolution: usize,
    plan: OffloadPlan,
    ps_total: f64,
    evaluated: usize,
    feasible: usize,
}

enum Failure {
    Config(String),
    Infeasible,
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidParams(_) | Error::TooFewTrials { .. } | Error::Domain { .. } => {
                Failure::Config(e.to_string())
            }
            Error::Infeasible(_) => {
                eprintln!("{e}");
                Failure::Infeasible
            }
            _ => Failure::Io(e.to_string()),
        }
    }
}

fn load_config(common: &CommonArgs) -> Result<ExperimentConfig, Failure> {
    if let Some(n) = common.workers {
        if n == 0 {
            return Err(Failure::Config("--workers must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::from_path(path).map_err(|e| match e {
            Error::Io { .. } => Failure::Config(e.to_string()),
            e => e.into(),
        })?,
        None => ExperimentConfig::default(),
    };
    if common.output.is_some() {
        cfg.output = common.output.clone();
    }
    Ok(cfg)
}

fn run(cmd: Command) -> Result<(), Failure> {
    let (args, default_axis, analytic_only) = match cmd {
        Command::Optimize(args) => return optimize(args),
        Command::Analytic(args) => (args, Some(SweepAxis::Point), true),
        Command::Simulate(args) => (args, Some(SweepAxis::Point), false),
        Command::Sweep(args) => (args, None, false),
    };
    let mut cfg = load_config(&args.common)?;
    if let Some(axis) = default_axis {
        cfg.sweep = axis;
    }
    if let Some(s) = &args.sweep {
        cfg.sweep = s.parse().map_err(Failure::Config)?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(list) = &args.scheme {
        cfg.schemes = parse_scheme_list(list)?;
    }
    if analytic_only {
        cfg.schemes = vec![SchemeSpec::Analytic];
    }
    let format = args.format.or(cfg.format).unwrap_or_default();
    let output = cfg.output.clone();

    let table = run_experiment(cfg)?;
    emit_results(&table, output.as_deref(), format)?;
    for p in &table.header.infeasible {
        eprintln!("infeasible at {} = {}: {}", p.sweep_axis, p.sweep_value, p.reason);
    }
    if table.all_infeasible() {
        return Err(Failure::Infeasible);
    }
    Ok(())
}

fn optimize(args: OptimizeArgs) -> Result<(), Failure> {
    let cfg = load_config(&args.common)?;
    let params = cfg.system_params().validated()?;
    let mut record = OptimizeRecord {
        params,
        feasible: false,
        plan: None,
        execution_times: None,
        ps: None,
        diagnostics: Vec::new(),
        grid: None,
    };
    match optimal_offload_plan(&params) {
        Ok(plan) => {
            record.feasible = true;
            record.execution_times = Some(execution_times(&plan, &params));
            record.ps = Some(plan_ps(&params, &plan)?);
            record.plan = Some(plan);
        }
        Err(Error::Infeasible(why)) => record.diagnostics = why,
        Err(e) => return Err(e.into()),
    }
    if let Some(n) = args.grid {
        let g = grid_search_oracle(&params, n, GridObjective::ClosedForm)?;
        record.grid = Some(GridRecord {
            resolution: n,
            plan: g.plan,
            ps_total: g.ps,
            evaluated: g.evaluated,
            feasible: g.feasible,
        });
    }

    let json = serde_json::to_string_pretty(&record).map_err(|e| Failure::Io(e.to_string()))?;
    match &cfg.output {
        Some(path) => std::fs::write(path, json + "\n").map_err(|source| {
            Failure::from(Error::Io {
                path: path.clone(),
                source,
            })
        })?,
        None => println!("{json}"),
    }
    for d in &record.diagnostics {
        eprintln!("infeasible: {d}");
    }
    if record.feasible {
        Ok(())
    } else {
        Err(Failure::Infeasible)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Infeasible) => ExitCode::from(3),
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
