//! Agreement checking, stall sweeps, and weakest-bounds reports.

use anyhow::Result;
use propmeter::propagate::DEFAULT_FIXPOINT_REL_TOL;
use propmeter::stall::{stall_sweep, StallCount};
use propmeter::weakest::DEFAULT_MAX_ITERATIONS;
use propmeter::{
    compute_weakest_bounds, fixpoints_agree, propagate_to_fixpoint, MeasuredRun, PropagationConfig,
    Variant,
};

use crate::instances::load_instances;
use crate::report::{ext, num, write_manifest, Csv};
use crate::run::{manifest_entries, measure_one, parallel_map, RunOutcome};
use crate::{report, ExperimentConfig, Outcomes};

/// How one instance's immediate and deferred fixpoints relate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Agreement {
    BothInfeasible,
    FixpointsMatch,
    Mismatch,
    /// At least one variant stopped before concluding, so there is
    /// nothing to compare.
    NoFixpoint,
}

impl Agreement {
    fn name(&self) -> &'static str {
        match self {
            Agreement::BothInfeasible => "both_infeasible",
            Agreement::FixpointsMatch => "fixpoints_match",
            Agreement::Mismatch => "mismatch",
            Agreement::NoFixpoint => "no_fixpoint",
        }
    }

    /// `None` when unconcluded (rendered as an empty CSV field).
    fn agrees(&self) -> Option<bool> {
        match self {
            Agreement::BothInfeasible | Agreement::FixpointsMatch => Some(true),
            Agreement::Mismatch => Some(false),
            Agreement::NoFixpoint => None,
        }
    }
}

#[derive(Debug)]
pub struct VerifyRow {
    pub instance: String,
    pub immediate_rounds: usize,
    pub deferred_rounds: usize,
    pub agreement: Agreement,
}

#[derive(Debug)]
pub struct VerifyReport {
    pub rows: Vec<VerifyRow>,
    pub disagreements: usize,
    pub outcomes: Outcomes,
    pub csv: String,
}

/// Runs both variants to their fixpoints on every instance and reports
/// whether they agree. Two infeasible verdicts agree; a mismatch is a
/// reported finding, not a command failure.
pub fn cmd_verify(config: &ExperimentConfig) -> Result<VerifyReport> {
    let (loaded, load_failures) = load_instances(&config.paths);
    let mut outcomes = Outcomes::default();
    for failure in &load_failures {
        eprintln!("skipping {}: {}", failure.path.display(), failure.message);
        outcomes.failure();
    }

    let results = parallel_map(&loaded, config.workers, |inst| {
        let run = |variant| {
            let cfg = PropagationConfig {
                variant,
                ..config.propagation.clone()
            };
            propagate_to_fixpoint(&inst.instance, &cfg)
        };
        (run(Variant::Immediate), run(Variant::Deferred))
    });

    let mut rows = Vec::new();
    let mut disagreements = 0;
    let mut csv = Csv::new(&[
        "instance",
        "immediate_rounds",
        "deferred_rounds",
        "agrees",
        "detail",
    ]);
    for (inst, result) in loaded.iter().zip(results) {
        let ((imm_state, imm_trace), (def_state, def_trace)) = match result {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                eprintln!("{}: {e}", inst.id);
                outcomes.failure();
                continue;
            }
        };
        let imm_done = imm_trace.fixpoint_reached || imm_state.is_infeasible();
        let def_done = def_trace.fixpoint_reached || def_state.is_infeasible();
        let agreement = if !(imm_done && def_done) {
            Agreement::NoFixpoint
        } else if imm_state.is_infeasible() || def_state.is_infeasible() {
            if imm_state.is_infeasible() && def_state.is_infeasible() {
                Agreement::BothInfeasible
            } else {
                Agreement::Mismatch
            }
        } else if fixpoints_agree(&imm_state, &def_state, DEFAULT_FIXPOINT_REL_TOL)? {
            Agreement::FixpointsMatch
        } else {
            Agreement::Mismatch
        };
        if agreement == Agreement::Mismatch {
            disagreements += 1;
            eprintln!("{}: variants disagree", inst.id);
        }
        csv.row(&[
            inst.id.clone(),
            num(imm_trace.total_rounds()),
            num(def_trace.total_rounds()),
            agreement
                .agrees()
                .map(|b| b.to_string())
                .unwrap_or_default(),
            agreement.name().to_string(),
        ]);
        rows.push(VerifyRow {
            instance: inst.id.clone(),
            immediate_rounds: imm_trace.total_rounds(),
            deferred_rounds: def_trace.total_rounds(),
            agreement,
        });
        outcomes.success();
    }

    let csv = csv.finish();
    report::write_file(&config.out_dir, "verify.csv", &csv)?;
    let mut entries = manifest_entries("verify", config);
    entries.push(("disagreements", disagreements.to_string()));
    write_manifest(&config.out_dir, &entries)?;

    Ok(VerifyReport {
        rows,
        disagreements,
        outcomes,
        csv,
    })
}

#[derive(Debug)]
pub struct StallSweepReport {
    /// Per selected variant: counts aligned with the configured grid.
    pub counts: Vec<(Variant, Vec<StallCount>)>,
    pub outcomes: Outcomes,
    pub csv: String,
}

/// Keep runs that changed something and have a defined finite-phase
/// curve; purely infinite runs have no finite shape to inspect.
fn stallable(run: &MeasuredRun) -> bool {
    !run.no_measurements && run.finite.is_some()
}

/// Sweeps the stall detector over the configured (p, q) grid for each
/// selected variant, counting how many measured runs stall.
pub fn cmd_stall(config: &ExperimentConfig) -> Result<StallSweepReport> {
    let (loaded, load_failures) = load_instances(&config.paths);
    let mut outcomes = Outcomes::default();
    for failure in &load_failures {
        eprintln!("skipping {}: {}", failure.path.display(), failure.message);
        outcomes.failure();
    }

    let mut counts = Vec::new();
    for &variant in &config.variants {
        let runs = parallel_map(&loaded, config.workers, |inst| {
            measure_one(&inst.instance, variant, &config.propagation)
        });
        let mut kept: Vec<&MeasuredRun> = Vec::new();
        for (inst, outcome) in loaded.iter().zip(runs.iter()) {
            match outcome {
                RunOutcome::Measured(run) => {
                    outcomes.success();
                    if stallable(run) {
                        kept.push(run);
                    }
                }
                RunOutcome::Infeasible { .. } => {
                    outcomes.success();
                }
                RunOutcome::Failed(message) => {
                    eprintln!("{} ({}): {message}", inst.id, variant.name());
                    outcomes.failure();
                }
            }
        }
        let pairs: Vec<_> = kept
            .iter()
            .map(|run| (run.finite.as_ref().unwrap(), &run.trace))
            .collect();
        let swept = stall_sweep(&pairs, &config.stall_grid)?;
        counts.push((variant, swept));
    }

    let column = |variant: Variant, index: usize| -> String {
        counts
            .iter()
            .find(|(v, _)| *v == variant)
            .map(|(_, swept)| num(swept[index].stalled_runs))
            .unwrap_or_default()
    };
    let mut csv = Csv::new(&["p", "q", "stalls_immediate", "stalls_deferred"]);
    for (index, params) in config.stall_grid.iter().enumerate() {
        csv.row(&[
            num(params.p),
            num(params.q),
            column(Variant::Immediate, index),
            column(Variant::Deferred, index),
        ]);
    }

    let csv = csv.finish();
    report::write_file(&config.out_dir, "stall.csv", &csv)?;
    let mut entries = manifest_entries("stall", config);
    for (variant, swept) in &counts {
        let total = swept.first().map_or(0, |count| count.total_runs);
        entries.push(match variant {
            Variant::Immediate => ("included_immediate", total.to_string()),
            Variant::Deferred => ("included_deferred", total.to_string()),
        });
    }
    write_manifest(&config.out_dir, &entries)?;

    Ok(StallSweepReport {
        counts,
        outcomes,
        csv,
    })
}

#[derive(Debug)]
pub struct WeakestReport {
    /// (instance id, cap_hit, iterations_used).
    pub rows: Vec<(String, bool, usize)>,
    pub outcomes: Outcomes,
    pub files: Vec<String>,
}

/// Computes the weakest still-reachable bounds for every instance and
/// writes one CSV per instance plus a summary.
pub fn cmd_weakest(config: &ExperimentConfig) -> Result<WeakestReport> {
    let (loaded, load_failures) = load_instances(&config.paths);
    let mut outcomes = Outcomes::default();
    for failure in &load_failures {
        eprintln!("skipping {}: {}", failure.path.display(), failure.message);
        outcomes.failure();
    }

    let mut rows = Vec::new();
    let mut files = Vec::new();
    let mut summary = Csv::new(&["instance", "cap_hit", "iterations_used"]);
    for inst in &loaded {
        let weakest = compute_weakest_bounds(&inst.instance, DEFAULT_MAX_ITERATIONS);
        let mut csv = Csv::new(&["variable", "weakest_lower", "weakest_upper"]);
        for j in 0..inst.instance.num_vars() {
            csv.row(&[num(j), ext(weakest.lower(j)), ext(weakest.upper(j))]);
        }
        let name = format!("{}.weakest.csv", inst.id);
        report::write_file(&config.out_dir, &name, &csv.finish())?;
        files.push(name);
        summary.row(&[
            inst.id.clone(),
            num(weakest.cap_hit),
            num(weakest.iterations_used),
        ]);
        rows.push((inst.id.clone(), weakest.cap_hit, weakest.iterations_used));
        outcomes.success();
    }

    report::write_file(&config.out_dir, "weakest_runs.csv", &summary.finish())?;
    write_manifest(&config.out_dir, &manifest_entries("weakest-bounds", config))?;

    Ok(WeakestReport {
        rows,
        outcomes,
        files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agreement_labels_are_stable() {
        assert_eq!(Agreement::BothInfeasible.name(), "both_infeasible");
        assert_eq!(Agreement::FixpointsMatch.agrees(), Some(true));
        assert_eq!(Agreement::Mismatch.agrees(), Some(false));
        assert_eq!(Agreement::NoFixpoint.agrees(), None);
    }
}
