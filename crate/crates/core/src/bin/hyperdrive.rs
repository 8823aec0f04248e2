use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use hyperdrive::harness::checks::experiment_checks;
use hyperdrive::harness::export::export_traces;
use hyperdrive::harness::output::{read_records, summary_csv, write_records, write_summary_json};
use hyperdrive::harness::scenario::{parse_scenario, WILDFIRE_TOML};
use hyperdrive::harness::{load_scenario, run_experiment, summarize, RunOptions, ScenarioConfig, SchedulerKind};
use hyperdrive::ConfigError;

#[derive(Parser)]
#[command(name = "hyperdrive", version, about = "Schedule serverless workflows across Edge, Cloud and LEO satellites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scheduler x size x seed matrix.
    Run {
        /// Scenario file; the bundled wildfire scenario if omitted.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        schedulers: Option<Vec<SchedulerKind>>,
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        parallel: usize,
        /// Evaluate the matrix-level checks; exit 3 if any fails.
        #[arg(long)]
        check: bool,
    },
    /// Summarize the records of a previous run.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Write node positions and link latencies for one world.
    ExportTraces {
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, default_value_t = 1118)]
        size: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Offsets in seconds from the workflow trigger; defaults to the scheduling instants.
        #[arg(long, value_delimiter = ',')]
        at: Vec<f64>,
        #[arg(long, default_value = "traces")]
        out: PathBuf,
    },
    /// Parse and validate a scenario file.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

enum Failure {
    Config(ConfigError),
    Check,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

fn scenario(path: Option<&Path>) -> Result<ScenarioConfig, ConfigError> {
    match path {
        Some(p) => load_scenario(p),
        None => parse_scenario(WILDFIRE_TOML, Path::new("wildfire.toml")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Check) => ExitCode::from(3),
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run {
            scenario: path,
            out,
            schedulers,
            sizes,
            seeds,
            parallel,
            check,
        } => {
            let mut cfg = scenario(path.as_deref())?;
            if let Some(s) = schedulers {
                cfg.schedulers = s;
            }
            if let Some(s) = sizes {
                cfg.sizes = s;
            }
            if let Some(s) = seeds {
                cfg.seeds = s;
            }
            cfg.validate()?;
            let out = out.unwrap_or_else(|| cfg.output_dir.clone());
            let started = Instant::now();
            let records = run_experiment(&cfg, &RunOptions { parallel })?;
            let elapsed = started.elapsed();
            let summary = summarize(&records);
            write_records(&out, &records)?;
            write_summary_json(&out, &summary)?;
            eprintln!(
                "{} records in {:.1}s written to {}",
                records.len(),
                elapsed.as_secs_f64(),
                out.display()
            );
            summary_csv(&summary, std::io::stdout()).map_err(|e| ConfigError::invalid("output", e.to_string()))?;
            if check {
                let results = experiment_checks(&records, &summary);
                for r in &results {
                    println!("{r}");
                }
                if results.iter().any(|r| !r.passed) {
                    return Err(Failure::Check);
                }
            }
            Ok(())
        }
        Command::Summarize { input, format } => {
            let records = read_records(&input)?;
            if records.is_empty() {
                return Err(ConfigError::invalid("in", "no records found").into());
            }
            let summary = summarize(&records);
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&summary).map_err(|e| ConfigError::invalid("summary", e.to_string()))?
                ),
                Format::Csv => {
                    summary_csv(&summary, std::io::stdout()).map_err(|e| ConfigError::invalid("summary", e.to_string()))?
                }
            }
            Ok(())
        }
        Command::ExportTraces {
            scenario: path,
            size,
            seed,
            at,
            out,
        } => {
            let cfg = scenario(path.as_deref())?;
            let (positions, links) = export_traces(&cfg, size, seed, &at, &out)?;
            eprintln!("{positions} positions and {links} links written to {}", out.display());
            Ok(())
        }
        Command::Validate { scenario: path } => {
            let cfg = load_scenario(&path)?;
            println!(
                "{}: ok ({} tasks, {} schedulers x {} sizes x {} seeds)",
                cfg.name,
                cfg.workflow.tasks.len(),
                cfg.schedulers.len(),
                cfg.sizes.len(),
                cfg.seeds.len()
            );
            Ok(())
        }
    }
}
