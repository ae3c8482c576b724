//! Premature-stalling detection on normalized progress curves.
//!
//! A run stalls prematurely at a round when nothing structural happened
//! (no bound left infinity on either side), the curve is momentarily flat
//! (first derivative below a threshold), and yet meaningful progress
//! still lies ahead (second derivative exceeds a threshold somewhere at
//! or after the round). Derivatives are estimated from the curve samples
//! alone, so the test needs no knowledge of the algorithm that produced
//! the run.

use crate::progress::ProgressCurve;
use crate::propagate::{BoundSide, PropagationTrace};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StallError {
    #[error("need at least two samples to differentiate, got {have}")]
    TooFewSamples { have: usize },
    #[error("sample times must be strictly increasing (violated at index {index})")]
    NonIncreasingTimes { index: usize },
    #[error("curve covers {curve_rounds} rounds but the trace has {trace_rounds}")]
    TraceMismatch {
        curve_rounds: usize,
        trace_rounds: usize,
    },
}

/// First derivative of a sampled function, estimated at every sample
/// point. Three or more samples use second-order stencils (central in the
/// interior, one-sided at the ends) that stay second-order on nonuniform
/// grids; exactly two samples fall back to the segment slope.
pub fn sampled_derivative(points: &[(f64, f64)]) -> Result<Vec<(f64, f64)>, StallError> {
    let n = points.len();
    if n < 2 {
        return Err(StallError::TooFewSamples { have: n });
    }
    for i in 1..n {
        if points[i].0 <= points[i - 1].0 {
            return Err(StallError::NonIncreasingTimes { index: i });
        }
    }
    if n == 2 {
        let slope = (points[1].1 - points[0].1) / (points[1].0 - points[0].0);
        return Ok(vec![(points[0].0, slope), (points[1].0, slope)]);
    }
    let mut out = Vec::with_capacity(n);
    {
        // Left end: forward stencil over the first three samples.
        let (t0, f0) = points[0];
        let (t1, f1) = points[1];
        let (t2, f2) = points[2];
        let h1 = t1 - t0;
        let h2 = t2 - t1;
        let d = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * f0 + (h1 + h2) / (h1 * h2) * f1
            - h1 / (h2 * (h1 + h2)) * f2;
        out.push((t0, d));
    }
    for i in 1..n - 1 {
        let (tm, fm) = points[i - 1];
        let (ti, fi) = points[i];
        let (tp, fp) = points[i + 1];
        let h1 = ti - tm;
        let h2 = tp - ti;
        let d =
            -h2 / (h1 * (h1 + h2)) * fm + (h2 - h1) / (h1 * h2) * fi + h1 / (h2 * (h1 + h2)) * fp;
        out.push((ti, d));
    }
    {
        // Right end: backward stencil over the last three samples.
        let (t0, f0) = points[n - 3];
        let (t1, f1) = points[n - 2];
        let (t2, f2) = points[n - 1];
        let h1 = t1 - t0;
        let h2 = t2 - t1;
        let d = h2 / (h1 * (h1 + h2)) * f0 - (h1 + h2) / (h1 * h2) * f1
            + (2.0 * h2 + h1) / (h2 * (h1 + h2)) * f2;
        out.push((t2, d));
    }
    Ok(out)
}

/// Thresholds of the stalling test: the curve counts as flat below `p`
/// and as having progress ahead above `q`. `p` may be infinite to accept
/// any slope as flat.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StallParams {
    pub p: f64,
    pub q: f64,
}

impl StallParams {
    pub fn new(p: f64, q: f64) -> Self {
        StallParams { p, q }
    }
}

impl std::fmt::Display for StallParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let show = |v: f64| -> String {
            if v.is_infinite() {
                "inf".to_string()
            } else {
                format!("{v}")
            }
        };
        write!(f, "(p={}, q={})", show(self.p), show(self.q))
    }
}

/// The default threshold grid swept by the reporting tools.
pub fn default_sweep_grid() -> Vec<StallParams> {
    vec![
        StallParams::new(f64::INFINITY, 0.0),
        StallParams::new(0.1, 0.0),
        StallParams::new(0.1, 0.2),
        StallParams::new(0.1, 0.5),
        StallParams::new(0.5, 0.5),
        StallParams::new(0.5, 2.0),
    ]
}

/// Per-round stalling evaluation. The conditions are recorded separately
/// so reports can show which one failed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StallRoundRecord {
    pub round: usize,
    /// Normalized time at the end of the round.
    pub time: f64,
    pub first_derivative: f64,
    /// No lower bound left infinity in this round.
    pub no_lower_reductions: bool,
    /// No upper bound left infinity in this round.
    pub no_upper_reductions: bool,
    /// First derivative strictly below `p`.
    pub slow: bool,
    /// Second derivative strictly above `q` at some sample at or after
    /// this round's time.
    pub acceleration_ahead: bool,
}

impl StallRoundRecord {
    pub fn stalled(&self) -> bool {
        self.no_lower_reductions && self.no_upper_reductions && self.slow && self.acceleration_ahead
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StallReport {
    pub params: StallParams,
    pub records: Vec<StallRoundRecord>,
    pub stalled: bool,
    pub first_stall_round: Option<usize>,
}

/// Evaluates the stalling test on one curve. Rounds before the second
/// are never candidates: the first round starts from the raw instance and
/// cannot be a stall of an ongoing run.
pub fn detect_stall(
    curve: &ProgressCurve,
    trace: &PropagationTrace,
    params: StallParams,
) -> Result<StallReport, StallError> {
    if curve.round_infinite_reductions.len() != trace.total_rounds() {
        return Err(StallError::TraceMismatch {
            curve_rounds: curve.round_infinite_reductions.len(),
            trace_rounds: trace.total_rounds(),
        });
    }
    let points = curve.points();
    let first = sampled_derivative(&points)?;
    let second = sampled_derivative(&first)?;
    let lower_reduced: Vec<bool> = trace
        .rounds
        .iter()
        .map(|r| {
            r.changes
                .iter()
                .any(|c| c.side == BoundSide::Lower && c.is_infinite_reduction())
        })
        .collect();
    let upper_reduced: Vec<bool> = trace
        .rounds
        .iter()
        .map(|r| {
            r.changes
                .iter()
                .any(|c| c.side == BoundSide::Upper && c.is_infinite_reduction())
        })
        .collect();
    let mut records = Vec::new();
    let mut first_stall_round = None;
    for (i, sample) in curve.samples.iter().enumerate() {
        if sample.round < 2 {
            continue;
        }
        let no_lower = !lower_reduced[sample.round - 1];
        let no_upper = !upper_reduced[sample.round - 1];
        let slow = first[i].1 < params.p;
        let acceleration_ahead = second[i..].iter().any(|&(_, v)| v > params.q);
        let record = StallRoundRecord {
            round: sample.round,
            time: sample.time,
            first_derivative: first[i].1,
            no_lower_reductions: no_lower,
            no_upper_reductions: no_upper,
            slow,
            acceleration_ahead,
        };
        if record.stalled() && first_stall_round.is_none() {
            first_stall_round = Some(sample.round);
        }
        records.push(record);
    }
    Ok(StallReport {
        params,
        stalled: first_stall_round.is_some(),
        records,
        first_stall_round,
    })
}

/// How many of the given runs stall at each threshold pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StallCount {
    pub params: StallParams,
    pub stalled_runs: usize,
    pub total_runs: usize,
}

pub fn stall_sweep(
    runs: &[(&ProgressCurve, &PropagationTrace)],
    grid: &[StallParams],
) -> Result<Vec<StallCount>, StallError> {
    let mut counts = Vec::with_capacity(grid.len());
    for &params in grid {
        let mut stalled_runs = 0;
        for &(curve, trace) in runs {
            if detect_stall(curve, trace, params)?.stalled {
                stalled_runs += 1;
            }
        }
        counts.push(StallCount {
            params,
            stalled_runs,
            total_runs: runs.len(),
        });
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::progress::CurveSample;
    use crate::propagate::{BoundChange, PropagationTrace, RoundStats};
    use crate::ExtReal;

    fn ext(v: f64) -> ExtReal {
        ExtReal::new(v).unwrap()
    }

    const GRID: [(f64, f64); 5] = [
        (0.0, 0.0),
        (25.0, 1.0),
        (50.0, 2.0),
        (75.0, 3.0),
        (100.0, 100.0),
    ];

    #[test]
    fn first_derivative_on_late_jump_curve() {
        let d = sampled_derivative(&GRID).unwrap();
        let expected = [0.04, 0.04, 0.04, 1.96, 5.8];
        for (i, (t, v)) in d.iter().enumerate() {
            assert_eq!(*t, GRID[i].0);
            assert!(
                (v - expected[i]).abs() < 1e-12,
                "P'({t}) = {v}, want {}",
                expected[i]
            );
        }
    }

    #[test]
    fn second_derivative_on_late_jump_curve() {
        let first = sampled_derivative(&GRID).unwrap();
        let second = sampled_derivative(&first).unwrap();
        let expected = [0.0, 0.0, 0.0384, 0.1152, 0.192];
        for (i, (t, v)) in second.iter().enumerate() {
            assert!(
                (v - expected[i]).abs() < 1e-12,
                "P''({t}) = {v}, want {}",
                expected[i]
            );
        }
    }

    #[test]
    fn derivative_exact_on_quadratic_nonuniform_grid() {
        // Second-order stencils reproduce quadratics exactly, including on
        // uneven spacing. f(t) = t^2 - 3t + 2, f'(t) = 2t - 3.
        let ts = [0.0, 1.0, 2.5, 3.0, 7.0];
        let pts: Vec<(f64, f64)> = ts.iter().map(|&t| (t, t * t - 3.0 * t + 2.0)).collect();
        let d = sampled_derivative(&pts).unwrap();
        for (t, v) in d {
            assert!((v - (2.0 * t - 3.0)).abs() < 1e-9, "f'({t}) = {v}");
        }
    }

    #[test]
    fn two_point_derivative_is_segment_slope() {
        let d = sampled_derivative(&[(0.0, 0.0), (100.0, 100.0)]).unwrap();
        assert_eq!(d, vec![(0.0, 1.0), (100.0, 1.0)]);
    }

    #[test]
    fn derivative_rejects_bad_grids() {
        assert!(matches!(
            sampled_derivative(&[(0.0, 1.0)]),
            Err(StallError::TooFewSamples { have: 1 })
        ));
        assert!(matches!(
            sampled_derivative(&[(0.0, 1.0), (0.0, 2.0), (1.0, 3.0)]),
            Err(StallError::NonIncreasingTimes { index: 1 })
        ));
    }

    /// Curve and trace shaped like the late-jump grid: four rounds ending
    /// at times 25, 50, 75, 100, with all infinite reductions in round 1.
    fn late_jump_run() -> (ProgressCurve, PropagationTrace) {
        let samples: Vec<CurveSample> = GRID
            .iter()
            .enumerate()
            .map(|(i, &(t, p))| CurveSample {
                round: i,
                raw_time_ns: (t * 1000.0) as u64,
                time: t,
                progress: p,
            })
            .collect();
        let mut trace = PropagationTrace::default();
        for round in 1..=4 {
            let changes = if round == 1 {
                vec![BoundChange {
                    variable: 0,
                    side: BoundSide::Upper,
                    old: ExtReal::PosInf,
                    new: ext(5.0),
                }]
            } else {
                vec![BoundChange {
                    variable: 0,
                    side: BoundSide::Upper,
                    old: ext(5.0),
                    new: ext(4.0),
                }]
            };
            let infinite_reductions = changes.iter().filter(|c| c.is_infinite_reduction()).count();
            trace.rounds.push(RoundStats {
                round,
                changes,
                infinite_reductions,
                duration_ns: 1,
            });
        }
        trace.fixpoint_reached = true;
        let curve = ProgressCurve {
            samples,
            round_infinite_reductions: trace
                .rounds
                .iter()
                .map(|r| r.infinite_reductions > 0)
                .collect(),
            trivial: false,
        };
        (curve, trace)
    }

    #[test]
    fn stalls_at_round_two_of_late_jump_curve() {
        let (curve, trace) = late_jump_run();
        let report = detect_stall(&curve, &trace, StallParams::new(0.1, 0.1)).unwrap();
        assert!(report.stalled);
        assert_eq!(report.first_stall_round, Some(2));
        // Rounds 0 and 1 are not candidates; records start at round 2.
        assert_eq!(report.records.len(), 3);
        let r2 = &report.records[0];
        assert_eq!(r2.round, 2);
        assert_eq!(r2.time, 50.0);
        assert!(r2.stalled());
        // Round 3 is already fast (P' = 1.96) and does not stall.
        assert!(!report.records[1].stalled());
        assert!(!report.records[1].slow);
    }

    #[test]
    fn infinite_reduction_blocks_stall() {
        let (curve, mut trace) = late_jump_run();
        // Make round 2 perform an infinite reduction on the lower side.
        trace.rounds[1].changes.push(BoundChange {
            variable: 1,
            side: BoundSide::Lower,
            old: ExtReal::NegInf,
            new: ext(0.0),
        });
        trace.rounds[1].infinite_reductions = 1;
        let report = detect_stall(&curve, &trace, StallParams::new(0.1, 0.1)).unwrap();
        assert!(!report.stalled);
        assert!(!report.records[0].no_lower_reductions);
        assert!(report.records[0].no_upper_reductions);
    }

    #[test]
    fn infinite_p_accepts_any_slope_as_flat() {
        let (curve, trace) = late_jump_run();
        let report = detect_stall(&curve, &trace, StallParams::new(f64::INFINITY, 0.0)).unwrap();
        // Every candidate round is slow; rounds 2 and 3 still see positive
        // acceleration ahead.
        assert!(report.stalled);
        assert_eq!(report.first_stall_round, Some(2));
        assert!(report.records.iter().all(|r| r.slow));
    }

    #[test]
    fn concave_curve_never_stalls_for_positive_q() {
        // P(t) = 2t - t^2/100 is strictly concave and increasing on
        // [0, 100]; the stencils recover P'' = -0.02 exactly, so no
        // positive acceleration ever lies ahead.
        let samples: Vec<CurveSample> = [0.0f64, 25.0, 50.0, 75.0, 100.0]
            .iter()
            .enumerate()
            .map(|(i, &t)| CurveSample {
                round: i,
                raw_time_ns: (t * 1000.0) as u64 + 1,
                time: t,
                progress: 2.0 * t - t * t / 100.0,
            })
            .collect();
        let mut trace = PropagationTrace::default();
        for round in 1..=4 {
            trace.rounds.push(RoundStats {
                round,
                changes: Vec::new(),
                infinite_reductions: 0,
                duration_ns: 1,
            });
        }
        let curve = ProgressCurve {
            samples,
            round_infinite_reductions: vec![false; 4],
            trivial: false,
        };
        for q in [0.0, 0.1, 0.5, 2.0] {
            for p in [0.1, 0.5, f64::INFINITY] {
                let report = detect_stall(&curve, &trace, StallParams::new(p, q)).unwrap();
                assert!(!report.stalled, "unexpected stall at p={p}, q={q}");
            }
        }
    }

    #[test]
    fn sweep_counts_stalls_per_threshold() {
        let (curve, trace) = late_jump_run();
        let runs = vec![(&curve, &trace)];
        let counts = stall_sweep(&runs, &default_sweep_grid()).unwrap();
        assert_eq!(counts.len(), 6);
        for count in &counts {
            assert_eq!(count.total_runs, 1);
            // The late-jump curve accelerates hard (P'' up to 0.192 on the
            // curve scale but the sweep thresholds q >= 0.2 use the same
            // scale), so only low-q thresholds fire.
            let expect = count.params.q < 0.192 && (count.params.p > 0.04);
            assert_eq!(
                count.stalled_runs == 1,
                expect,
                "params {} gave {}",
                count.params,
                count.stalled_runs
            );
        }
    }
}
