use clap::{Args, Parser, Subcommand};
use robust_semigroup::transport::PenaltyKind;
use robust_semigroup_cli::config::ExperimentConfig;
use robust_semigroup_cli::runner;
use std::path::PathBuf;
use std::process::ExitCode;

/// Robust one-step operators, their dyadic iteration, and the limiting
/// equation, driven by a JSON experiment config.
#[derive(Parser)]
#[command(name = "robust-semigroup", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dyadic convergence study against the refined-grid scheme solution.
    Converge(RunArgs),
    /// Property-check suite (operator laws, inequalities, oracles).
    Check(RunArgs),
    /// Solve the limiting equation on the configured grid.
    Pde(RunArgs),
    /// Apply a single robust step at the configured horizon.
    Step(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the finest dyadic level.
    #[arg(long)]
    level: Option<u32>,
    /// Replace the penalty by a ball of this radius slope.
    #[arg(long)]
    delta: Option<f64>,
    /// Override the number of grid points per axis.
    #[arg(long = "grid-n", value_name = "N")]
    grid_n: Option<usize>,
    /// Override the horizon T.
    #[arg(long)]
    horizon: Option<f64>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn load(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::from_file(&self.config)?;
        if let Some(level) = self.level {
            cfg.levels.max = level;
            cfg.levels.min = cfg.levels.min.min(level);
        }
        if let Some(delta) = self.delta {
            cfg.penalty.kind = PenaltyKind::Ball { delta };
        }
        if let Some(n) = self.grid_n {
            cfg.grid.points_per_axis = n;
        }
        if let Some(t) = self.horizon {
            cfg.horizon = t;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        Ok(cfg)
    }
}

fn run() -> anyhow::Result<bool> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Converge(args) => {
            let outcome = runner::run_converge(&args.load()?)?;
            println!("{}", outcome.summary);
            Ok(outcome.pass)
        }
        Command::Check(args) => {
            let outcome = runner::run_checks(&args.load()?)?;
            println!("{}", outcome.summary);
            Ok(outcome.pass)
        }
        Command::Pde(args) => {
            let (_, _, summary) = runner::run_pde(&args.load()?)?;
            println!("{summary}");
            Ok(true)
        }
        Command::Step(args) => {
            let (_, _, summary) = runner::run_step(&args.load()?)?;
            println!("{summary}");
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
