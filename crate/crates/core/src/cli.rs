//! Command-line parsing and the subcommand drivers.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::cleaning::{CleaningPolicy, CleaningSchedule};
use crate::engine::{run_replica_with, SimConfig, TraceRow, DEFAULT_HORIZON};
use crate::environment::Grid;
use crate::error::{ConfigError, Error, Result};
use crate::experiments::{
    self, replica_seed, run_experiment, sort_results, summarize_results, ComboSpec,
    ExperimentPlan, DEFAULT_REPLICAS,
};
use crate::io::{self, FileConfig};
use crate::metrics::ReplicaResult;
use crate::model::Parameters;
use crate::Scenario;

const DEFAULT_INTERVAL: u32 = 10;
const DEFAULT_RATE: f64 = 1.0;
const DEFAULT_RANDOM_COUNT: u32 = 24;

#[derive(Debug, Parser)]
#[command(name = "wardsim", version, about = "C. difficile ward transmission simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run replicas of a single scenario.
    Simulate(SimulateArgs),
    /// Run a factorial experiment (1, 2, 3 or all).
    Experiment(ExperimentArgs),
    /// Summarise an existing results CSV.
    Summarize(SummarizeArgs),
    /// Print the ward layout.
    Layout,
}

#[derive(Debug, Args, Default)]
struct CommonArgs {
    /// TOML settings file; flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    horizon: Option<u32>,
    #[arg(long)]
    replicas: Option<u32>,
    #[arg(long)]
    parallelism: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    direct_infection: Option<bool>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    disinfect: Option<bool>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    random_disinfect: Option<bool>,
    #[arg(long)]
    high_touch_disinfection_interval: Option<u32>,
    #[arg(long)]
    high_touch_disinfection_rate: Option<f64>,
    #[arg(long)]
    low_touch_disinfection_interval: Option<u32>,
    #[arg(long)]
    low_touch_disinfection_rate: Option<f64>,
    #[arg(long)]
    number_of_random_cleaning: Option<u32>,
    /// Write a per-tick trace.csv (first replica only).
    #[arg(long)]
    trace: bool,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// 1, 2, 3 or `all`.
    which: String,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct SummarizeArgs {
    /// A results.csv written by `simulate` or `experiment`.
    input: PathBuf,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

/// A fully resolved command line.
#[derive(Debug, Clone)]
pub enum CliInvocation {
    Simulate {
        config: SimConfig,
        replicas: u32,
        out_dir: Option<PathBuf>,
        trace: bool,
    },
    Experiment {
        plan: ExperimentPlan,
        parallelism: usize,
        out_dir: PathBuf,
    },
    Summarize {
        input: PathBuf,
        out_dir: Option<PathBuf>,
    },
    Layout,
}

fn clap_error(err: clap::Error) -> Error {
    let context = |kind| {
        err.get(kind)
            .map(|v| v.to_string())
            .unwrap_or_default()
    };
    use clap::error::ContextKind;
    let mapped = match err.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
            return Error::Usage {
                text: err.render().to_string(),
                success: true,
            }
        }
        ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand | ErrorKind::MissingSubcommand => {
            return Error::Usage {
                text: err.render().to_string(),
                success: false,
            }
        }
        ErrorKind::UnknownArgument | ErrorKind::InvalidSubcommand => {
            ConfigError::UnknownFlag(context(ContextKind::InvalidArg))
        }
        ErrorKind::ArgumentConflict => ConfigError::ConflictingFlags(
            context(ContextKind::InvalidArg),
            context(ContextKind::PriorArg),
        ),
        _ => ConfigError::InvalidValue {
            flag: context(ContextKind::InvalidArg)
                .trim_start_matches('-')
                .to_string(),
            value: context(ContextKind::InvalidValue),
            reason: err.kind().to_string(),
        },
    };
    Error::Config(mapped)
}

fn check_rate(flag: &str, rate: Option<f64>) -> Result<(), ConfigError> {
    match rate {
        Some(r) if !(0.0..=1.0).contains(&r) => Err(ConfigError::InvalidValue {
            flag: flag.into(),
            value: r.to_string(),
            reason: "rate must lie in [0, 1]".into(),
        }),
        _ => Ok(()),
    }
}

fn load_file(common: &CommonArgs) -> Result<FileConfig> {
    match &common.config {
        Some(path) => FileConfig::load(path),
        None => Ok(FileConfig::default()),
    }
}

fn resolve_scenario(args: &SimulateArgs, file: &FileConfig) -> Result<Scenario, ConfigError> {
    check_rate("high-touch-disinfection-rate", args.high_touch_disinfection_rate)?;
    check_rate("low-touch-disinfection-rate", args.low_touch_disinfection_rate)?;

    let disinfect = args.disinfect.or(file.disinfect).unwrap_or(false);
    let random = args.random_disinfect.or(file.random_disinfect).unwrap_or(false);
    if disinfect && random {
        return Err(ConfigError::ConflictingFlags(
            "disinfect".into(),
            "random-disinfect".into(),
        ));
    }
    let schedule = CleaningSchedule {
        ht_interval: args
            .high_touch_disinfection_interval
            .or(file.high_touch_disinfection_interval)
            .unwrap_or(DEFAULT_INTERVAL),
        ht_rate: args
            .high_touch_disinfection_rate
            .or(file.high_touch_disinfection_rate)
            .unwrap_or(DEFAULT_RATE),
        lt_interval: args
            .low_touch_disinfection_interval
            .or(file.low_touch_disinfection_interval)
            .unwrap_or(DEFAULT_INTERVAL),
        lt_rate: args
            .low_touch_disinfection_rate
            .or(file.low_touch_disinfection_rate)
            .unwrap_or(DEFAULT_RATE),
    };
    let cleaning = if disinfect {
        CleaningPolicy::Total(schedule)
    } else if random {
        CleaningPolicy::Random {
            schedule,
            count_per_type: args
                .number_of_random_cleaning
                .or(file.number_of_random_cleaning)
                .unwrap_or(DEFAULT_RANDOM_COUNT),
        }
    } else {
        CleaningPolicy::None
    };
    Ok(Scenario {
        direct_infection: args.direct_infection.or(file.direct_infection).unwrap_or(false),
        cleaning: cleaning.validate()?,
    })
}

fn experiment_ids(which: &str) -> Result<Vec<u32>, ConfigError> {
    if which.eq_ignore_ascii_case("all") {
        return Ok(vec![1, 2, 3]);
    }
    match which.parse::<u32>() {
        Ok(id @ 1..=3) => Ok(vec![id]),
        Ok(id) => Err(ConfigError::UnknownExperiment(id)),
        Err(_) => Err(ConfigError::InvalidValue {
            flag: "experiment".into(),
            value: which.into(),
            reason: "expected 1, 2, 3 or all".into(),
        }),
    }
}

/// Parses a full argument list (including the program name) into a
/// resolved invocation. Absent settings fall back to the config file, then
/// to the built-in defaults.
pub fn parse_invocation<I, T>(args: I) -> Result<CliInvocation>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(clap_error)?;
    match cli.command {
        Command::Layout => Ok(CliInvocation::Layout),
        Command::Summarize(a) => Ok(CliInvocation::Summarize {
            input: a.input,
            out_dir: a.out_dir,
        }),
        Command::Simulate(a) => {
            let file = load_file(&a.common)?;
            let scenario = resolve_scenario(&a, &file)?;
            let params = file.parameters.clone().unwrap_or_default().validate()?;
            let config = SimConfig {
                params,
                scenario,
                seed: a.common.seed.or(file.seed).unwrap_or(0),
                horizon: a.common.horizon.or(file.horizon).unwrap_or(DEFAULT_HORIZON),
            };
            Ok(CliInvocation::Simulate {
                config,
                replicas: a.common.replicas.or(file.replicas).unwrap_or(1),
                out_dir: a.common.out_dir.clone(),
                trace: a.trace,
            })
        }
        Command::Experiment(a) => {
            let file = load_file(&a.common)?;
            let ids = experiment_ids(&a.which)?;
            let mut combos = Vec::new();
            for id in ids {
                combos.extend(experiments::enumerate_combos(id)?);
            }
            let plan = ExperimentPlan::new(
                combos,
                a.common.replicas.or(file.replicas).unwrap_or(DEFAULT_REPLICAS),
                a.common.seed.or(file.seed).unwrap_or(0),
                file.parameters.clone().unwrap_or_default(),
                a.common.horizon.or(file.horizon).unwrap_or(DEFAULT_HORIZON),
            )?;
            Ok(CliInvocation::Experiment {
                plan,
                parallelism: a
                    .common
                    .parallelism
                    .or(file.parallelism)
                    .unwrap_or_else(default_parallelism),
                out_dir: a.common.out_dir.unwrap_or_else(|| PathBuf::from(".")),
            })
        }
    }
}

fn default_parallelism() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn stdout_err(source: std::io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

/// Runs replicas of one scenario. Replica `i` uses seed `config.seed + i`.
pub fn simulate(
    config: &SimConfig,
    replicas: u32,
    mut trace: Option<&mut dyn Write>,
) -> Result<Vec<ReplicaResult>> {
    let mut results = Vec::with_capacity(replicas as usize);
    for i in 0..replicas {
        let cfg = SimConfig {
            seed: config.seed.wrapping_add(u64::from(i)),
            ..config.clone()
        };
        let mut trace_err = None;
        let state = match (i, trace.as_deref_mut()) {
            (0, Some(w)) => {
                writeln!(w, "{}", TraceRow::HEADER).map_err(stdout_err)?;
                run_replica_with(&cfg, |s| {
                    if trace_err.is_none() {
                        if let Err(e) = writeln!(w, "{}", s.trace_row().to_csv_line()) {
                            trace_err = Some(e);
                        }
                    }
                })?
            }
            _ => run_replica_with(&cfg, |_| {})?,
        };
        if let Some(e) = trace_err {
            return Err(stdout_err(e));
        }
        results.push(ReplicaResult {
            experiment_id: 0,
            combo_id: cfg.scenario.combo_key(),
            replica_index: i,
            seed: cfg.seed,
            scenario: cfg.scenario,
            counters: state.counters,
            horizon: cfg.horizon,
        });
    }
    Ok(results)
}

/// Executes a resolved invocation, writing outputs to files or `stdout`.
pub fn execute(inv: CliInvocation, stdout: &mut dyn Write) -> Result<()> {
    match inv {
        CliInvocation::Layout => {
            stdout
                .write_all(Grid::generate_layout().render().as_bytes())
                .map_err(stdout_err)?;
        }
        CliInvocation::Simulate {
            config,
            replicas,
            out_dir,
            trace,
        } => match out_dir {
            Some(dir) => {
                ensure_dir(&dir)?;
                let results = if trace {
                    let path = dir.join("trace.csv");
                    let file = std::fs::File::create(&path).map_err(|source| Error::Io {
                        path: path.clone(),
                        source,
                    })?;
                    let mut w = std::io::BufWriter::new(file);
                    let r = simulate(&config, replicas, Some(&mut w))?;
                    w.flush().map_err(|source| Error::Io { path, source })?;
                    r
                } else {
                    simulate(&config, replicas, None)?
                };
                io::write_results_file(&results, &dir.join("results.csv"))?;
            }
            None => {
                let results = if trace {
                    simulate(&config, replicas, Some(&mut *stdout))?
                } else {
                    simulate(&config, replicas, None)?
                };
                if trace {
                    writeln!(stdout).map_err(stdout_err)?;
                }
                io::write_results_csv(&results, &mut *stdout)?;
            }
        },
        CliInvocation::Experiment {
            plan,
            parallelism,
            out_dir,
        } => {
            ensure_dir(&out_dir)?;
            let out = run_experiment(&plan, parallelism)?;
            let n = io::write_results_file(&out.results, &out_dir.join("results.csv"))?;
            io::write_summary_file(&out.summaries, &out_dir.join("summary.csv"))?;
            writeln!(
                stdout,
                "{n} replicas over {} combos written to {}",
                plan.combos.len(),
                out_dir.display()
            )
            .map_err(stdout_err)?;
        }
        CliInvocation::Summarize { input, out_dir } => {
            let mut results = io::read_results_file(&input)?;
            sort_results(&mut results);
            let summaries = summarize_results(&results);
            match out_dir {
                Some(dir) => {
                    ensure_dir(&dir)?;
                    io::write_summary_file(&summaries, &dir.join("summary.csv"))?;
                }
                None => {
                    io::write_summary_csv(&summaries, &mut *stdout)?;
                }
            }
        }
    }
    Ok(())
}

/// Reproduces one run of an experiment plan in isolation.
pub fn rerun(plan: &ExperimentPlan, combo: &ComboSpec, replica_index: u32) -> Result<ReplicaResult> {
    debug_assert_eq!(
        plan.sim_config(combo, replica_index).seed,
        replica_seed(plan.base_seed, &combo.combo_id, replica_index)
    );
    plan.run_one(combo, replica_index)
}

/// Default parameters, exposed for `--help` style listings and bindings.
pub fn default_parameters() -> Parameters {
    Parameters::default()
}
