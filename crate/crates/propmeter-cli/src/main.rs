use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use propmeter::propagate::{DEFAULT_MAX_ROUNDS, DEFAULT_SIGNIFICANCE_REL_TOL};
use propmeter::stall::StallParams;
use propmeter::{StopMode, Variant};
use propmeter_cli::analyze::{cmd_stall, cmd_verify, cmd_weakest};
use propmeter_cli::compare::cmd_compare;
use propmeter_cli::instances::collect_paths;
use propmeter_cli::run::cmd_run;
use propmeter_cli::{default_progress_grid, ExperimentConfig, DEFAULT_TIME_FLOOR_NS};

/// Bounds-tightening measurement harness for linear constraint systems.
#[derive(Parser)]
#[command(name = "propmeter", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure propagation runs and write per-round progress curves.
    Run(RunArgs),
    /// Compare wall-clock time to reach progress levels between variants.
    Compare(CompareArgs),
    /// Check that both variants conclude identically on each instance.
    Verify(CommonArgs),
    /// Count premature stalls over a grid of detector parameters.
    Stall(StallArgs),
    /// Report the weakest bounds any single update can move through.
    WeakestBounds(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Instance files or glob patterns; `.mps` files are read as MPS,
    /// everything else as the line-oriented text format.
    #[arg(long, required = true, num_args = 1..)]
    instances: Vec<String>,
    /// Directory for CSV outputs and the run manifest.
    #[arg(long, default_value = "propmeter-out")]
    out: PathBuf,
    /// Hard cap on propagation rounds.
    #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
    max_rounds: usize,
    /// When to stop a run.
    #[arg(long, value_enum, default_value_t = StopArg::Fixpoint)]
    stop: StopArg,
    /// Relative significance threshold for the tolerance stop mode.
    #[arg(long, default_value_t = DEFAULT_SIGNIFICANCE_REL_TOL)]
    tau: f64,
    /// Worker threads; each timed run stays exclusive to one worker.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum StopArg {
    Fixpoint,
    Tolerance,
}

impl From<StopArg> for StopMode {
    fn from(arg: StopArg) -> StopMode {
        match arg {
            StopArg::Fixpoint => StopMode::Fixpoint,
            StopArg::Tolerance => StopMode::Tolerance,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Immediate,
    Deferred,
    Both,
}

impl VariantArg {
    fn to_variants(self) -> Vec<Variant> {
        match self {
            VariantArg::Immediate => vec![Variant::Immediate],
            VariantArg::Deferred => vec![Variant::Deferred],
            VariantArg::Both => vec![Variant::Immediate, Variant::Deferred],
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RoleArg {
    Immediate,
    Deferred,
}

impl From<RoleArg> for Variant {
    fn from(arg: RoleArg) -> Variant {
        match arg {
            RoleArg::Immediate => Variant::Immediate,
            RoleArg::Deferred => Variant::Deferred,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which propagation variant(s) to measure.
    #[arg(long, value_enum, default_value_t = VariantArg::Both)]
    variant: VariantArg,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Variant in the numerator of each speedup ratio.
    #[arg(long, value_enum, default_value_t = RoleArg::Immediate)]
    baseline: RoleArg,
    /// Variant in the denominator of each speedup ratio.
    #[arg(long, value_enum, default_value_t = RoleArg::Deferred)]
    candidate: RoleArg,
    /// Comma-separated progress levels in (0, 100]; defaults to deciles.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    progress_grid: Option<Vec<f64>>,
    /// Times below this many nanoseconds are clamped before forming
    /// ratios, to keep noise-dominated measurements out of the means.
    #[arg(long, default_value_t = DEFAULT_TIME_FLOOR_NS)]
    floor_ns: f64,
}

#[derive(Args)]
struct StallArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which propagation variant(s) to sweep.
    #[arg(long, value_enum, default_value_t = VariantArg::Both)]
    variant: VariantArg,
    /// Comma-separated slowness thresholds; `inf` is accepted. Paired
    /// elementwise with --q.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    p: Option<Vec<f64>>,
    /// Comma-separated acceleration thresholds, paired with --p.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    q: Option<Vec<f64>>,
}

fn build_config(common: &CommonArgs, variants: Vec<Variant>) -> Result<ExperimentConfig> {
    let paths = collect_paths(&common.instances)?;
    let mut config = ExperimentConfig::new(paths, common.out.clone());
    config.variants = variants;
    config.propagation.max_rounds = common.max_rounds;
    config.propagation.stop_mode = common.stop.into();
    config.propagation.significance_rel_tol = common.tau;
    config.workers = common.workers;
    Ok(config)
}

fn stall_grid(p: Option<Vec<f64>>, q: Option<Vec<f64>>) -> Result<Option<Vec<StallParams>>> {
    match (p, q) {
        (None, None) => Ok(None),
        (Some(_), None) | (None, Some(_)) => bail!("--p and --q must be given together"),
        (Some(p), Some(q)) => {
            if p.len() != q.len() {
                bail!("--p lists {} values but --q lists {}", p.len(), q.len());
            }
            Ok(Some(
                p.into_iter()
                    .zip(q)
                    .map(|(p, q)| StallParams::new(p, q))
                    .collect(),
            ))
        }
    }
}

/// Exit 3: bad configuration. Exit 2: the command itself failed. Else
/// the command's own tally decides (0 clean, 1 partial, 2 total failure).
fn dispatch(command: Command) -> Result<ExitCode, ExitCode> {
    let configure = |result: Result<ExperimentConfig>| -> Result<ExperimentConfig, ExitCode> {
        let config = result
            .and_then(|config| {
                config.validate()?;
                Ok(config)
            })
            .map_err(|err| {
                eprintln!("invalid configuration: {err:#}");
                ExitCode::from(3)
            })?;
        Ok(config)
    };
    let fail = |err: anyhow::Error| -> ExitCode {
        eprintln!("error: {err:#}");
        ExitCode::from(2)
    };

    match command {
        Command::Run(args) => {
            let config = configure(build_config(&args.common, args.variant.to_variants()))?;
            let report = cmd_run(&config).map_err(fail)?;
            println!(
                "run: {} succeeded, {} failed, {} files -> {}",
                report.outcomes.successes,
                report.outcomes.failures,
                report.files.len(),
                config.out_dir.display()
            );
            Ok(ExitCode::from(report.outcomes.exit_code()))
        }
        Command::Compare(args) => {
            let config = configure(build_config(&args.common, vec![]).map(|mut config| {
                config.variants = vec![Variant::from(args.baseline), Variant::from(args.candidate)];
                config.variants.dedup();
                config.progress_grid = args.progress_grid.unwrap_or_else(default_progress_grid);
                config.floor_ns = args.floor_ns;
                config
            }))?;
            let report =
                cmd_compare(&config, args.baseline.into(), args.candidate.into()).map_err(fail)?;
            for summary in &report.summaries {
                match summary.geomean {
                    Some(g) => println!(
                        "compare: {} phase at {}%: geomean speedup {:.6} over {} instances",
                        summary.phase.name(),
                        summary.x,
                        g,
                        summary.included
                    ),
                    None => println!(
                        "compare: {} phase at {}%: no instances with a defined curve",
                        summary.phase.name(),
                        summary.x
                    ),
                }
            }
            Ok(ExitCode::from(report.outcomes.exit_code()))
        }
        Command::Verify(common) => {
            let config = configure(build_config(
                &common,
                vec![Variant::Immediate, Variant::Deferred],
            ))?;
            let report = cmd_verify(&config).map_err(fail)?;
            for row in &report.rows {
                if row.agreement == propmeter_cli::analyze::Agreement::Mismatch {
                    println!("verify: {} DISAGREES", row.instance);
                }
            }
            println!(
                "verify: {} checked, {} disagreements, {} failed",
                report.rows.len(),
                report.disagreements,
                report.outcomes.failures
            );
            Ok(ExitCode::from(report.outcomes.exit_code()))
        }
        Command::Stall(args) => {
            let config = configure(
                build_config(&args.common, args.variant.to_variants()).and_then(|mut config| {
                    if let Some(grid) = stall_grid(args.p, args.q)? {
                        config.stall_grid = grid;
                    }
                    Ok(config)
                }),
            )?;
            let report = cmd_stall(&config).map_err(fail)?;
            for (variant, counts) in &report.counts {
                for count in counts {
                    println!(
                        "stall: {} {}: {}/{} runs stalled",
                        variant.name(),
                        count.params,
                        count.stalled_runs,
                        count.total_runs
                    );
                }
            }
            Ok(ExitCode::from(report.outcomes.exit_code()))
        }
        Command::WeakestBounds(common) => {
            let config = configure(build_config(&common, vec![Variant::Immediate]))?;
            let report = cmd_weakest(&config).map_err(fail)?;
            for (id, cap_hit, iterations) in &report.rows {
                if *cap_hit {
                    println!("weakest-bounds: {id} hit the iteration cap ({iterations})");
                }
            }
            println!(
                "weakest-bounds: {} instances, {} files -> {}",
                report.rows.len(),
                report.files.len(),
                config.out_dir.display()
            );
            Ok(ExitCode::from(report.outcomes.exit_code()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(code) | Err(code) => code,
    }
}
