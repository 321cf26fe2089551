use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use seiarb::cea::CeaAnalysis;
use seiarb::config::{parse_selection, OutputFormat, RunConfig};
use seiarb::model::compute_r0;
use seiarb::runner::{self, RunStatus};
use seiarb::Error;

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERIC: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

#[derive(Parser)]
#[command(name = "seiarb", version, about = "SEIARB optimal control and cost-effectiveness analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// TOML or JSON config file; built-in defaults when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// csv, json or both
    #[arg(long, value_name = "FORMAT")]
    format: Option<OutputFormat>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the selected strategies and write trajectories, summaries and
    /// the cost-effectiveness report.
    Run {
        #[command(flatten)]
        config: ConfigArg,
        /// Comma-separated strategy ids (1-14).
        #[arg(long, value_name = "N[,N...]")]
        strategy: Option<String>,
        /// A, B, C, D or all.
        #[arg(long, value_name = "SCENARIO")]
        scenario: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
        /// Skip solving and rerun the cost-effectiveness analysis on a
        /// records CSV.
        #[arg(long, value_name = "CSV")]
        replay: Option<PathBuf>,
    },
    /// Rerun the cost-effectiveness analysis on a records CSV with header
    /// strategy_id,infections_averted,cost,recoveries.
    Replay {
        records: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check a config file and report the first invalid field.
    ValidateConfig {
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Print the basic reproduction number of the configured parameters.
    PrintR0 {
        #[command(flatten)]
        config: ConfigArg,
    },
}

fn load(arg: &ConfigArg) -> seiarb::Result<RunConfig> {
    match &arg.config {
        Some(path) => RunConfig::load(path),
        None => Ok(RunConfig::default()),
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config { .. } | Error::Records { .. } | Error::Csv(_) => EXIT_CONFIG,
        _ => EXIT_NUMERIC,
    }
}

fn apply_output(config: &mut RunConfig, output: &OutputArgs) {
    if let Some(out) = &output.out {
        config.out_dir = out.clone();
    }
    if let Some(format) = output.format {
        config.format = format;
    }
}

fn print_cea(analysis: &CeaAnalysis) {
    for s in &analysis.scenarios {
        println!(
            "scenario {}: eliminated {:?}, winner {}",
            s.scenario,
            s.report.elimination_order(),
            s.report.winner
        );
    }
    println!(
        "overall: eliminated {:?}, winner {}",
        analysis.overall.elimination_order(),
        analysis.overall.winner
    );
}

fn replay(records: &Path, config: &RunConfig) -> seiarb::Result<u8> {
    let analysis = runner::replay_cea(records, &config.out_dir, config.format)?;
    print_cea(&analysis);
    Ok(0)
}

fn run(
    mut config: RunConfig,
    strategy: Option<&str>,
    scenario: Option<&str>,
    replay_file: Option<&Path>,
) -> seiarb::Result<u8> {
    if let Some(records) = replay_file {
        return replay(records, &config);
    }
    let selection: Vec<&str> = [strategy, scenario].into_iter().flatten().collect();
    if !selection.is_empty() {
        config.strategies = parse_selection(&selection.join(","))?;
    }
    let (result, status) = runner::run(&config)?;
    println!(
        "{:>8} {:>14} {:>14} {:>14} {:>6} {:>9}",
        "strategy", "J", "averted", "cost", "iters", "converged"
    );
    for o in &result.outcomes {
        let s = &o.summary;
        println!(
            "{:>8} {:>14.6e} {:>14.6e} {:>14.6e} {:>6} {:>9}",
            o.strategy_id, s.objective_j, s.infections_averted, s.total_cost, s.iterations, s.converged
        );
    }
    if let Some(cea) = &result.cea {
        print_cea(cea);
    }
    println!("outputs written to {}", config.out_dir.display());
    match status {
        RunStatus::Success => Ok(0),
        RunStatus::NotConverged => {
            eprintln!("warning: at least one sweep stopped at max_iters without converging");
            Ok(EXIT_NOT_CONVERGED)
        }
    }
}

fn dispatch(cli: Cli) -> seiarb::Result<u8> {
    match cli.command {
        Command::Run {
            config,
            strategy,
            scenario,
            output,
            replay,
        } => {
            let mut c = load(&config)?;
            apply_output(&mut c, &output);
            run(c, strategy.as_deref(), scenario.as_deref(), replay.as_deref())
        }
        Command::Replay {
            records,
            config,
            output,
        } => {
            let mut c = load(&config)?;
            apply_output(&mut c, &output);
            replay(&records, &c)
        }
        Command::ValidateConfig { config } => {
            let c = load(&config)?;
            c.validate()?;
            println!("config ok: {} strategies selected", c.strategies.len());
            Ok(0)
        }
        Command::PrintR0 { config } => {
            let c = load(&config)?;
            c.params.validate()?;
            println!("{}", compute_r0(&c.params)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
