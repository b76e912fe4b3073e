mod commands;
mod config;
mod failure;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dqimpact::corruption::ErrorType;
use dqimpact::evaluate::{Measure, Task};
use dqimpact::robustness::SizeThresholds;

use commands::{InjectSettings, RecommendArgs, SweepOverrides};
use failure::{Failure, Outcome};

/// Measure how dirty data degrades classical learning algorithms.
#[derive(Parser)]
#[command(name = "dqimpact", version)]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Corrupt one dataset and write it with a summary and an audit trail.
    Inject(InjectCmd),
    /// Run a rate sweep described by a configuration file.
    Sweep(SweepCmd),
    /// Pick an algorithm and cleaning targets from a sweep report.
    Recommend(RecommendCmd),
    /// Check a configuration file and the data it names.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct InjectCmd {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_parser = parse_error_type)]
    error_type: ErrorType,
    /// Fraction in [0, 1].
    #[arg(long)]
    rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Target column; the last column by default.
    #[arg(long)]
    target: Option<String>,
    /// Functional dependency `A,B -> C`; repeatable.
    #[arg(long = "rule")]
    rules: Vec<String>,
    #[arg(long)]
    rules_file: Option<PathBuf>,
    /// Entity key column; repeatable.
    #[arg(long = "entity-key")]
    entity_key: Vec<String>,
    /// Comma-separated columns eligible for corruption.
    #[arg(long, value_delimiter = ',')]
    columns: Option<Vec<String>>,
    /// Allow the target column to be corrupted.
    #[arg(long)]
    corrupt_target: bool,
}

#[derive(Args)]
struct SweepCmd {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Print the resolved plan and exit.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Args)]
struct RecommendCmd {
    /// `report.json` written by `sweep`.
    #[arg(long)]
    report: PathBuf,
    #[arg(long, value_parser = parse_task)]
    task: Task,
    #[arg(long)]
    missing: Option<f64>,
    #[arg(long)]
    inconsistent: Option<f64>,
    #[arg(long)]
    conflicting: Option<f64>,
    /// Measure the error rates and size of this dataset.
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    target: Option<String>,
    #[arg(long = "rule")]
    rules: Vec<String>,
    #[arg(long)]
    rules_file: Option<PathBuf>,
    #[arg(long = "entity-key")]
    entity_key: Vec<String>,
    /// Row count of the data to be analysed.
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long, value_parser = parse_measure)]
    priority: Option<Measure>,
    #[arg(long, default_value_t = 1000)]
    small: usize,
    #[arg(long, default_value_t = 10000)]
    large: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_error_type(s: &str) -> Result<ErrorType, String> {
    s.parse().map_err(|e: dqimpact::Error| e.to_string())
}

fn parse_task(s: &str) -> Result<Task, String> {
    s.parse().map_err(|e: dqimpact::Error| e.to_string())
}

fn parse_measure(s: &str) -> Result<Measure, String> {
    s.parse().map_err(|e: dqimpact::Error| e.to_string())
}

fn run(cli: Cli) -> Outcome {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Failure::Config("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Inject(c) => commands::cmd_inject(&InjectSettings {
            input: c.input,
            output: c.output,
            error_type: c.error_type,
            rate: c.rate,
            seed: c.seed,
            target: c.target,
            rules: c.rules,
            rules_file: c.rules_file,
            entity_key: c.entity_key,
            columns: c.columns,
            corrupt_target: c.corrupt_target,
        }),
        Command::Sweep(c) => commands::cmd_sweep(
            &c.config,
            &SweepOverrides {
                output_dir: c.output_dir,
                seed: c.seed,
                dry_run: c.dry_run,
            },
        ),
        Command::Recommend(c) => commands::cmd_recommend(&RecommendArgs {
            report: c.report,
            task: c.task,
            missing: c.missing,
            inconsistent: c.inconsistent,
            conflicting: c.conflicting,
            dataset: c.dataset,
            target: c.target,
            rules: c.rules,
            rules_file: c.rules_file,
            entity_key: c.entity_key,
            rows: c.rows,
            priority: c.priority,
            sizes: SizeThresholds {
                small: c.small,
                large: c.large,
            },
            output: c.output,
        }),
        Command::ValidateConfig { config } => commands::cmd_validate(&config),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            f.code()
        }
    }
}
