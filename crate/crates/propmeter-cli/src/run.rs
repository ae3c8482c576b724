//! Corpus measurement and the `run` subcommand.

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::Result;
use propmeter::progress::ProgressError;
use propmeter::{
    measure_run, MeasuredRun, ProblemInstance, PropagationConfig, PropagationTrace, Variant,
};

use crate::instances::{load_instances, LoadedInstance};
use crate::report::{num, opt_num, write_manifest, Csv};
use crate::{report, ExperimentConfig, Outcomes};

/// Applies `f` to every item on up to `workers` threads, preserving input
/// order in the results. Each item runs on exactly one worker, so the
/// timing pass inside `f` never shares its thread with other work.
pub fn parallel_map<T, R, F>(items: &[T], workers: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    if workers <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let results: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers.min(items.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = items.get(i) else { break };
                *results[i]
                    .lock()
                    .expect("worker panicked holding a result slot") = Some(f(item));
            });
        }
    });
    results
        .into_iter()
        .map(|slot| {
            slot.into_inner()
                .expect("scope joined all workers")
                .expect("every slot filled")
        })
        .collect()
}

/// What one (instance, variant) execution produced.
#[derive(Debug, Clone)]
pub enum RunOutcome {
    Measured(Box<MeasuredRun>),
    /// Propagation proved the instance infeasible; the partial trace is
    /// kept for the trace CSV but there are no curves to score.
    Infeasible {
        trace: Box<PropagationTrace>,
    },
    Failed(String),
}

#[derive(Debug, Clone)]
pub struct InstanceRun {
    pub id: String,
    pub variant: Variant,
    pub outcome: RunOutcome,
}

pub fn measure_one(
    instance: &ProblemInstance,
    variant: Variant,
    base: &PropagationConfig,
) -> RunOutcome {
    let config = PropagationConfig {
        variant,
        ..base.clone()
    };
    match measure_run(instance, &config) {
        Ok(run) => RunOutcome::Measured(Box::new(run)),
        Err(ProgressError::Infeasible { trace }) => RunOutcome::Infeasible { trace },
        Err(err) => RunOutcome::Failed(format!("{err}")),
    }
}

/// Measures every (instance, variant) pair; results keep the (id,
/// variant) task order, which is sorted because the loader sorts by id.
pub fn measure_corpus(
    loaded: &[LoadedInstance],
    variants: &[Variant],
    base: &PropagationConfig,
    workers: usize,
) -> Vec<InstanceRun> {
    let tasks: Vec<(usize, Variant)> = loaded
        .iter()
        .enumerate()
        .flat_map(|(i, _)| variants.iter().map(move |&v| (i, v)))
        .collect();
    parallel_map(&tasks, workers, |&(i, variant)| InstanceRun {
        id: loaded[i].id.clone(),
        variant,
        outcome: measure_one(&loaded[i].instance, variant, base),
    })
}

/// Per-round progress CSV: one row per round of the scoring pass. The
/// `time_ns` column carries wall-clock measurements and is the only
/// non-deterministic column.
pub fn progress_csv(id: &str, variant: Variant, run: &MeasuredRun) -> String {
    let mut csv = Csv::new(&[
        "instance",
        "variant",
        "round",
        "time_ns",
        "n_current",
        "p_inf",
        "p_fin_raw",
        "p_fin_norm",
    ]);
    for s in &run.snapshots {
        csv.row(&[
            id.to_string(),
            variant.name().to_string(),
            num(s.round),
            num(s.time_ns),
            num(s.n_current),
            opt_num(s.p_inf),
            num(s.p_fin_raw),
            opt_num(s.p_fin_norm),
        ]);
    }
    csv.finish()
}

/// Per-round trace CSV: accepted change counts and round durations.
pub fn trace_csv(trace: &PropagationTrace) -> String {
    let mut csv = Csv::new(&["round", "changes", "inf_reductions", "duration_ns"]);
    for r in &trace.rounds {
        csv.row(&[
            num(r.round),
            num(r.changes.len()),
            num(r.infinite_reductions),
            num(r.duration_ns),
        ]);
    }
    csv.finish()
}

#[derive(Debug, Clone)]
pub struct RunRow {
    pub id: String,
    pub variant: Option<Variant>,
    pub status: &'static str,
    pub rounds: usize,
    pub total_changes: usize,
    pub detail: String,
}

#[derive(Debug)]
pub struct RunReport {
    pub rows: Vec<RunRow>,
    pub outcomes: Outcomes,
    pub files: Vec<PathBuf>,
}

fn sanitize_detail(message: &str) -> String {
    message.replace([',', '\n'], ";")
}

/// Measures the corpus and writes per-run progress and trace CSVs, a
/// `runs.csv` index, and the manifest. Unreadable or unmeasurable
/// entries are logged, reported, and skipped.
pub fn cmd_run(config: &ExperimentConfig) -> Result<RunReport> {
    let (loaded, load_failures) = load_instances(&config.paths);
    for instance in &loaded {
        for warning in &instance.warnings {
            eprintln!("{}: {warning}", instance.path.display());
        }
    }

    let runs = measure_corpus(
        &loaded,
        &config.variants,
        &config.propagation,
        config.workers,
    );

    let mut rows = Vec::new();
    let mut outcomes = Outcomes::default();
    let mut files = Vec::new();

    for failure in &load_failures {
        eprintln!("skipping {}: {}", failure.path.display(), failure.message);
        outcomes.failure();
        rows.push(RunRow {
            id: failure.path.display().to_string(),
            variant: None,
            status: "error",
            rounds: 0,
            total_changes: 0,
            detail: sanitize_detail(&failure.message),
        });
    }

    for run in &runs {
        let (status, rounds, changes, detail) = match &run.outcome {
            RunOutcome::Measured(measured) => {
                let name = format!("{}.{}.progress.csv", run.id, run.variant.name());
                files.push(report::write_file(
                    &config.out_dir,
                    &name,
                    &progress_csv(&run.id, run.variant, measured),
                )?);
                let name = format!("{}.{}.trace.csv", run.id, run.variant.name());
                files.push(report::write_file(
                    &config.out_dir,
                    &name,
                    &trace_csv(&measured.trace),
                )?);
                outcomes.success();
                let status = if measured.no_measurements {
                    "zero_changes"
                } else {
                    "measured"
                };
                (
                    status,
                    measured.trace.total_rounds(),
                    measured.trace.total_changes(),
                    String::new(),
                )
            }
            RunOutcome::Infeasible { trace } => {
                let name = format!("{}.{}.trace.csv", run.id, run.variant.name());
                files.push(report::write_file(
                    &config.out_dir,
                    &name,
                    &trace_csv(trace),
                )?);
                outcomes.success();
                (
                    "infeasible",
                    trace.total_rounds(),
                    trace.total_changes(),
                    String::new(),
                )
            }
            RunOutcome::Failed(message) => {
                eprintln!("{} ({}): {message}", run.id, run.variant.name());
                outcomes.failure();
                ("error", 0, 0, sanitize_detail(message))
            }
        };
        rows.push(RunRow {
            id: run.id.clone(),
            variant: Some(run.variant),
            status,
            rounds,
            total_changes: changes,
            detail,
        });
    }

    let mut index = Csv::new(&[
        "instance",
        "variant",
        "status",
        "rounds",
        "total_changes",
        "detail",
    ]);
    for row in &rows {
        index.row(&[
            row.id.clone(),
            row.variant
                .map(|v| v.name().to_string())
                .unwrap_or_default(),
            row.status.to_string(),
            num(row.rounds),
            num(row.total_changes),
            row.detail.clone(),
        ]);
    }
    files.push(report::write_file(
        &config.out_dir,
        "runs.csv",
        &index.finish(),
    )?);
    files.push(write_manifest(
        &config.out_dir,
        &manifest_entries("run", config),
    )?);

    Ok(RunReport {
        rows,
        outcomes,
        files,
    })
}

pub fn manifest_entries(command: &str, config: &ExperimentConfig) -> Vec<(&'static str, String)> {
    let variants = config
        .variants
        .iter()
        .map(|v| v.name())
        .collect::<Vec<_>>()
        .join("+");
    let grid = config
        .progress_grid
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    let stall_grid = config
        .stall_grid
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    let stop = match config.propagation.stop_mode {
        propmeter::StopMode::Fixpoint => "fixpoint",
        propmeter::StopMode::Tolerance => "tolerance",
    };
    vec![
        ("command", command.to_string()),
        ("instances", config.paths.len().to_string()),
        ("variants", variants),
        ("max_rounds", config.propagation.max_rounds.to_string()),
        ("stop", stop.to_string()),
        ("tau", config.propagation.significance_rel_tol.to_string()),
        (
            "accept_abs_tol",
            config.propagation.accept_abs_tol.to_string(),
        ),
        (
            "integrality_eps",
            config.propagation.integrality_eps.to_string(),
        ),
        ("progress_grid", grid),
        ("stall_grid", stall_grid),
        ("workers", config.workers.to_string()),
        ("time_floor_ns", config.floor_ns.to_string()),
    ]
}
