//! Speedup-at-progress comparison between two variants.

use anyhow::Result;
use propmeter::{MeasuredRun, Phase, ProgressCurve, Variant};

use crate::instances::load_instances;
use crate::report::{num, opt_num, write_manifest, Csv};
use crate::run::{manifest_entries, measure_one, parallel_map, RunOutcome};
use crate::{report, ExperimentConfig, Outcomes};

/// Raw wall-clock time (ns) at which the curve first reaches normalized
/// progress `x`, by inverse linear interpolation on the raw-time samples;
/// the smallest such time wins on plateaus. `x = 100` returns the full
/// run time, including the round that confirms the fixed point. `None`
/// outside (0, 100].
pub fn time_at_progress(curve: &ProgressCurve, x: f64) -> Option<f64> {
    if !(x > 0.0 && x <= 100.0) {
        return None;
    }
    if x == 100.0 {
        return Some(curve.final_raw_time_ns() as f64);
    }
    for pair in curve.samples.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        if next.progress >= x {
            // prev.progress < x <= next.progress, so the span is nonzero.
            let span = next.progress - prev.progress;
            let fraction = (x - prev.progress) / span;
            let t0 = prev.raw_time_ns as f64;
            let t1 = next.raw_time_ns as f64;
            return Some(t0 + fraction * (t1 - t0));
        }
    }
    // Normalized curves end at 100, so x < 100 is always reached.
    Some(curve.final_raw_time_ns() as f64)
}

/// Geometric mean; `None` for an empty slice.
pub fn geometric_mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let log_sum: f64 = values.iter().map(|v| v.ln()).sum();
    Some((log_sum / values.len() as f64).exp())
}

/// One instance's timing at one progress level in one phase.
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub phase: Phase,
    pub x: f64,
    pub instance: String,
    pub t_baseline_ns: f64,
    pub t_candidate_ns: f64,
    /// t_baseline / t_candidate, after both times are floored.
    pub speedup: f64,
    /// True when either time was clamped up to the configured floor.
    pub floored: bool,
}

#[derive(Debug, Clone)]
pub struct CompareSummary {
    pub phase: Phase,
    pub x: f64,
    pub included: usize,
    pub geomean: Option<f64>,
}

#[derive(Debug)]
pub struct CompareReport {
    pub rows: Vec<ComparisonRow>,
    pub summaries: Vec<CompareSummary>,
    pub outcomes: Outcomes,
    pub csv: String,
}

struct MeasuredPair {
    id: String,
    baseline: RunOutcome,
    candidate: RunOutcome,
}

fn phase_curve(run: &MeasuredRun, phase: Phase) -> Option<&ProgressCurve> {
    match phase {
        Phase::Infinite => run.infinite.as_ref(),
        Phase::Finite => run.finite.as_ref(),
    }
}

/// Measures `baseline` and `candidate` on every instance and tabulates
/// speedups at each grid level, split by phase. Comparing a variant
/// against itself reuses the single measured run, so every ratio is
/// exactly 1. Instances whose curve is undefined in a phase are excluded
/// from that phase; measurement failures exclude the whole instance.
pub fn cmd_compare(
    config: &ExperimentConfig,
    baseline: Variant,
    candidate: Variant,
) -> Result<CompareReport> {
    let (loaded, load_failures) = load_instances(&config.paths);
    let mut outcomes = Outcomes::default();
    for failure in &load_failures {
        eprintln!("skipping {}: {}", failure.path.display(), failure.message);
        outcomes.failure();
    }

    let pairs: Vec<MeasuredPair> = parallel_map(&loaded, config.workers, |inst| {
        let base = measure_one(&inst.instance, baseline, &config.propagation);
        let cand = if candidate == baseline {
            base.clone()
        } else {
            measure_one(&inst.instance, candidate, &config.propagation)
        };
        MeasuredPair {
            id: inst.id.clone(),
            baseline: base,
            candidate: cand,
        }
    });

    let mut usable: Vec<(String, Box<MeasuredRun>, Box<MeasuredRun>)> = Vec::new();
    for pair in pairs {
        match (pair.baseline, pair.candidate) {
            (RunOutcome::Measured(b), RunOutcome::Measured(c)) => {
                outcomes.success();
                usable.push((pair.id, b, c));
            }
            (RunOutcome::Infeasible { .. }, RunOutcome::Infeasible { .. }) => {
                // A legitimate outcome with nothing to compare.
                outcomes.success();
            }
            (RunOutcome::Failed(m), _) | (_, RunOutcome::Failed(m)) => {
                eprintln!("{}: {m}", pair.id);
                outcomes.failure();
            }
            _ => {
                eprintln!("{}: variants disagree about feasibility", pair.id);
                outcomes.failure();
            }
        }
    }

    let floor = config.floor_ns;
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    let mut csv = Csv::new(&[
        "phase",
        "x",
        "instance",
        "t_baseline_ns",
        "t_candidate_ns",
        "speedup",
        "floored",
    ]);
    for phase in [Phase::Infinite, Phase::Finite] {
        for &x in &config.progress_grid {
            let mut speedups = Vec::new();
            for (id, base_run, cand_run) in &usable {
                let (Some(bc), Some(cc)) =
                    (phase_curve(base_run, phase), phase_curve(cand_run, phase))
                else {
                    continue;
                };
                let (Some(tb), Some(tc)) = (time_at_progress(bc, x), time_at_progress(cc, x))
                else {
                    continue;
                };
                let floored = tb < floor || tc < floor;
                let tb = tb.max(floor);
                let tc = tc.max(floor);
                let speedup = tb / tc;
                speedups.push(speedup);
                rows.push(ComparisonRow {
                    phase,
                    x,
                    instance: id.clone(),
                    t_baseline_ns: tb,
                    t_candidate_ns: tc,
                    speedup,
                    floored,
                });
                csv.row(&[
                    phase.name().to_string(),
                    num(x),
                    id.clone(),
                    num(tb),
                    num(tc),
                    num(speedup),
                    num(floored),
                ]);
            }
            let geomean = geometric_mean(&speedups);
            summaries.push(CompareSummary {
                phase,
                x,
                included: speedups.len(),
                geomean,
            });
            csv.row(&[
                phase.name().to_string(),
                num(x),
                "(geomean)".to_string(),
                String::new(),
                String::new(),
                opt_num(geomean),
                String::new(),
            ]);
        }
    }

    let csv = csv.finish();
    report::write_file(&config.out_dir, "compare.csv", &csv)?;
    let mut entries = manifest_entries("compare", config);
    entries.push(("baseline", baseline.name().to_string()));
    entries.push(("candidate", candidate.name().to_string()));
    write_manifest(&config.out_dir, &entries)?;

    Ok(CompareReport {
        rows,
        summaries,
        outcomes,
        csv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use propmeter::progress::CurveSample;

    fn curve(points: &[(usize, u64, f64, f64)]) -> ProgressCurve {
        ProgressCurve {
            samples: points
                .iter()
                .map(|&(round, raw_time_ns, time, progress)| CurveSample {
                    round,
                    raw_time_ns,
                    time,
                    progress,
                })
                .collect(),
            round_infinite_reductions: Vec::new(),
            trivial: false,
        }
    }

    #[test]
    fn interpolates_linearly() {
        let c = curve(&[(0, 0, 0.0, 0.0), (1, 10_000_000, 100.0, 100.0)]);
        assert_eq!(time_at_progress(&c, 50.0), Some(5_000_000.0));
        assert_eq!(time_at_progress(&c, 100.0), Some(10_000_000.0));
        assert_eq!(time_at_progress(&c, 0.0), None);
        assert_eq!(time_at_progress(&c, 100.1), None);
    }

    #[test]
    fn plateaus_resolve_to_the_smallest_time() {
        let c = curve(&[
            (0, 0, 0.0, 0.0),
            (1, 4_000_000, 33.3, 80.0),
            (2, 10_000_000, 83.3, 80.0),
            (3, 12_000_000, 100.0, 100.0),
        ]);
        assert_eq!(time_at_progress(&c, 80.0), Some(4_000_000.0));
        assert_eq!(time_at_progress(&c, 100.0), Some(12_000_000.0));
    }

    #[test]
    fn time_is_monotone_in_x() {
        let c = curve(&[
            (0, 0, 0.0, 0.0),
            (1, 3_000, 25.0, 40.0),
            (2, 7_000, 60.0, 40.0),
            (3, 11_000, 100.0, 100.0),
        ]);
        let mut last = 0.0;
        for step in 1..=100 {
            let t = time_at_progress(&c, f64::from(step)).unwrap();
            assert!(t >= last, "x={step}: {t} < {last}");
            last = t;
        }
    }

    #[test]
    fn geometric_means_match_the_definition() {
        assert_eq!(geometric_mean(&[]), None);
        let g = geometric_mean(&[2.0, 8.0]).unwrap();
        assert!((g - 4.0).abs() < 1e-12);
        assert_eq!(geometric_mean(&[1.0, 1.0, 1.0]), Some(1.0));
    }
}
