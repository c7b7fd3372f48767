use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{ArgAction, Parser, Subcommand, ValueEnum};
use pareto_nrpa::experiment::{
    emit_report, run_experiment, Algorithm, ExperimentSpec, ReportFormat,
};
use pareto_nrpa::oracle::brute_force_front;
use pareto_nrpa::tsptw::{MoTsptw, MoTsptwInstance};
use pareto_nrpa::{AdaptStrategy, SearchConfig};

#[derive(Parser)]
#[command(
    name = "pnrpa",
    version,
    about = "Pareto-NRPA experiments on bi-objective TSPTW instances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded searches over a set of instances and write a report.
    Run(RunArgs),
    /// Convert a classic single-objective TSPTW file to the bi-objective format.
    Convert {
        #[arg(long)]
        classic: PathBuf,
        /// Seed of the generated secondary cost matrix.
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Enumerate every tour of a small instance and write its exact front as JSON.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    ParetoNrpa,
    Nrpa,
    RandomPlayout,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    All,
    One,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Glob matching instance files.
    #[arg(long)]
    instances: String,
    #[arg(long, value_enum)]
    algo: AlgoArg,
    #[arg(long, default_value_t = 4)]
    level: usize,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 4)]
    n_policies: usize,
    #[arg(long, default_value_t = 100)]
    iters: usize,
    #[arg(long, default_value_t = 100_000)]
    budget: u64,
    #[arg(long, default_value_t = 30)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "bias", overrides_with = "no_bias", action = ArgAction::SetTrue)]
    bias: bool,
    #[arg(long = "no-bias", action = ArgAction::SetTrue)]
    no_bias: bool,
    #[arg(long = "cd-weighting", overrides_with = "no_cd_weighting", action = ArgAction::SetTrue)]
    cd_weighting: bool,
    #[arg(long = "no-cd-weighting", action = ArgAction::SetTrue)]
    no_cd_weighting: bool,
    #[arg(long, value_enum, default_value = "all")]
    adapt_strategy: StrategyArg,
    /// Upper bound on the crowding-distance weight of one sequence.
    #[arg(long, default_value_t = 2.0)]
    cd_clip: f64,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Do not count a late return to the depot as a violation.
    #[arg(long)]
    ignore_depot_window: bool,
    /// Ideal vector for overall spread, e.g. `100,200` (default: union minimum).
    #[arg(long, value_delimiter = ',', num_args = 2, requires = "maximal")]
    ideal: Option<Vec<f64>>,
    /// Maximal vector for overall spread (default: union maximum).
    #[arg(long, value_delimiter = ',', num_args = 2, requires = "ideal")]
    maximal: Option<Vec<f64>>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Convert { classic, seed, out } => convert(&classic, seed, &out),
        Command::Oracle { instance, out } => oracle(&instance, &out),
    }
}

fn run(args: RunArgs) -> Result<()> {
    let mut instances = Vec::new();
    for entry in
        glob::glob(&args.instances).with_context(|| format!("bad glob {:?}", args.instances))?
    {
        instances.push(entry?);
    }
    if instances.is_empty() {
        bail!("no instance matches {:?}", args.instances);
    }
    instances.sort();

    let config = SearchConfig {
        level: args.level,
        alpha: args.alpha,
        n_policies: args.n_policies,
        iterations_per_level: args.iters,
        eval_budget: args.budget,
        use_bias: !args.no_bias,
        cd_weighting: !args.no_cd_weighting,
        adapt_strategy: match args.adapt_strategy {
            StrategyArg::All => AdaptStrategy::AllSequences,
            StrategyArg::One => AdaptStrategy::OneSequence,
        },
        cd_clip: args.cd_clip,
        rng_seed: args.seed,
    };
    let algorithm = match args.algo {
        AlgoArg::ParetoNrpa => Algorithm::ParetoNrpa,
        AlgoArg::Nrpa => Algorithm::Nrpa,
        AlgoArg::RandomPlayout => Algorithm::RandomPlayout,
        AlgoArg::Oracle => Algorithm::Oracle,
    };
    let spec = ExperimentSpec {
        n_runs: args.runs,
        base_seed: args.seed,
        threads: args.threads,
        check_depot_window: !args.ignore_depot_window,
        spread_bounds: args.ideal.zip(args.maximal),
        ..ExperimentSpec::new(instances, algorithm, config)
    };
    let report = run_experiment(&spec)?;
    let format = match args.format {
        FormatArg::Csv => ReportFormat::Csv,
        FormatArg::Json => ReportFormat::Json,
    };
    emit_report(&report, format, &args.out)?;
    Ok(())
}

fn convert(classic: &Path, seed: u64, out: &Path) -> Result<()> {
    let text = std::fs::read_to_string(classic)
        .with_context(|| format!("reading {}", classic.display()))?;
    let inst = MoTsptwInstance::parse_classic(&text, seed)
        .with_context(|| format!("parsing {}", classic.display()))?;
    std::fs::write(out, inst.to_text()).with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}

fn oracle(instance: &Path, out: &Path) -> Result<()> {
    let inst = MoTsptwInstance::from_file(instance)?;
    let exact = brute_force_front(&MoTsptw::new(inst))?;
    let json = serde_json::to_string_pretty(&exact)?;
    std::fs::write(out, json).with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}
