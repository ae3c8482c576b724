//! Algorithm-independent progress measurement for bound tightening runs.
//!
//! Progress is measured against two anchors computed once per instance:
//! the fixed-point limit (where the run ends up) and the weakest bounds
//! (the weakest finite values any single deduction can produce, the
//! earliest point a bound can reach when leaving infinity). The infinite
//! phase counts infinite bounds that have become finite; the finite phase
//! scores each bound by how far it has travelled from the weakest value
//! toward the limit.
//!
//! [`measure_run`] produces both phase curves for a run using two passes:
//! one instrumented pass that scores the state after every round, and one
//! clean pass that records wall-clock times. Determinism of the engine
//! makes the passes identical, which is asserted.

use crate::ext::ExtReal;
use crate::model::ProblemInstance;
use crate::propagate::{
    propagate_to_fixpoint, BoundSide, BoundsState, PropagateError, PropagationConfig,
    PropagationTrace, Runner, StopMode,
};
use crate::weakest::{self, compute_weakest_bounds, WeakestBounds};
use thiserror::Error;

/// Absolute slack allowed when checking that a current bound lies between
/// the weakest value and the limit.
pub const SCORE_SLACK: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ProgressError {
    #[error(transparent)]
    Propagate(#[from] PropagateError),
    #[error("bounds cover {left} variables but the reference covers {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("{snapshots} snapshots do not match a trace with {rounds} rounds")]
    SnapshotTraceMismatch { snapshots: usize, rounds: usize },
    #[error(
        "{side} bound{} outside [weakest, limit]: weakest {reference}, current {current}, limit {limit}",
        variable.map(|j| format!(" of variable {j}")).unwrap_or_default()
    )]
    ScoreOutOfRange {
        variable: Option<usize>,
        side: BoundSide,
        reference: f64,
        current: f64,
        limit: f64,
    },
    #[error(
        "{side} bound{} is finite but its limit is not",
        variable.map(|j| format!(" of variable {j}")).unwrap_or_default()
    )]
    ScoreInfiniteLimit {
        variable: Option<usize>,
        side: BoundSide,
    },
    #[error("instance is infeasible; progress is undefined")]
    Infeasible { trace: Box<PropagationTrace> },
    #[error("no fixed point within {rounds} rounds; reference limit unavailable")]
    FixpointNotReached { rounds: usize },
    #[error("scoring and timing passes diverged at round {round}")]
    PassMismatch { round: usize },
}

/// The two progress phases of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Fraction of infinite bounds already made finite.
    Infinite,
    /// Travelled fraction of each finite bound's path from weakest to limit.
    Finite,
}

impl Phase {
    pub fn name(&self) -> &'static str {
        match self {
            Phase::Infinite => "infinite",
            Phase::Finite => "finite",
        }
    }
}

/// Why a bound is left out of the finite-phase score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExclusionReason {
    /// The weakest-bounds sweep hit its iteration cap, so no weakest value
    /// is trustworthy for bounds that start infinite.
    WeakestCapHit,
    /// The weakest value stayed infinite although the limit is finite, so
    /// the bound has no reference interval.
    WeakestInfinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExcludedBound {
    pub variable: usize,
    pub side: BoundSide,
    pub reason: ExclusionReason,
}

/// Per-instance anchors for progress scoring: the weakest bounds, the
/// fixed-point limit, and the derived normalization constants.
#[derive(Debug, Clone)]
pub struct ProgressReference {
    weakest: WeakestBounds,
    limit: BoundsState,
    n_total: usize,
    max_score: usize,
    excluded: Vec<ExcludedBound>,
    lower_excluded: Vec<bool>,
    upper_excluded: Vec<bool>,
}

impl ProgressReference {
    pub fn new(
        instance: &ProblemInstance,
        weakest: WeakestBounds,
        limit: BoundsState,
    ) -> Result<Self, ProgressError> {
        let n = instance.num_vars();
        if weakest.lowers().len() != n || limit.lowers().len() != n {
            return Err(ProgressError::DimensionMismatch {
                left: weakest.lowers().len(),
                right: limit.lowers().len(),
            });
        }
        let start = BoundsState::starting(instance);
        let n_total = count_infinite_reductions(&start, &limit)?;
        let mut excluded = Vec::new();
        let mut lower_excluded = vec![false; n];
        let mut upper_excluded = vec![false; n];
        for j in 0..n {
            let sides = [
                (
                    BoundSide::Lower,
                    start.lower(j),
                    weakest.lower(j),
                    limit.lower(j),
                ),
                (
                    BoundSide::Upper,
                    start.upper(j),
                    weakest.upper(j),
                    limit.upper(j),
                ),
            ];
            for (side, start_b, weak_b, limit_b) in sides {
                // A bound that starts finite never leaves its value in the
                // weakest state, so it needs no exclusion logic.
                if start_b.is_finite() {
                    continue;
                }
                let reason = if weakest.cap_hit {
                    Some(ExclusionReason::WeakestCapHit)
                } else if !weak_b.is_finite() && limit_b.is_finite() {
                    Some(ExclusionReason::WeakestInfinite)
                } else {
                    None
                };
                if let Some(reason) = reason {
                    excluded.push(ExcludedBound {
                        variable: j,
                        side,
                        reason,
                    });
                    match side {
                        BoundSide::Lower => lower_excluded[j] = true,
                        BoundSide::Upper => upper_excluded[j] = true,
                    }
                }
            }
        }
        let mut max_score = 0;
        for j in 0..n {
            if !lower_excluded[j] && weakest.lower(j) != limit.lower(j) {
                max_score += 1;
            }
            if !upper_excluded[j] && weakest.upper(j) != limit.upper(j) {
                max_score += 1;
            }
        }
        Ok(ProgressReference {
            weakest,
            limit,
            n_total,
            max_score,
            excluded,
            lower_excluded,
            upper_excluded,
        })
    }

    pub fn weakest(&self) -> &WeakestBounds {
        &self.weakest
    }

    pub fn limit(&self) -> &BoundsState {
        &self.limit
    }

    /// Number of bounds that start infinite and are finite in the limit.
    pub fn n_total(&self) -> usize {
        self.n_total
    }

    /// Number of bounds contributing to the finite-phase score.
    pub fn max_score(&self) -> usize {
        self.max_score
    }

    pub fn excluded(&self) -> &[ExcludedBound] {
        &self.excluded
    }

    pub fn is_excluded(&self, variable: usize, side: BoundSide) -> bool {
        match side {
            BoundSide::Lower => self.lower_excluded[variable],
            BoundSide::Upper => self.upper_excluded[variable],
        }
    }
}

/// Counts bounds that are infinite in `start` and finite in `current`.
pub fn count_infinite_reductions(
    start: &BoundsState,
    current: &BoundsState,
) -> Result<usize, ProgressError> {
    let n = start.lowers().len();
    if current.lowers().len() != n {
        return Err(ProgressError::DimensionMismatch {
            left: n,
            right: current.lowers().len(),
        });
    }
    let mut count = 0;
    for j in 0..n {
        if !start.lower(j).is_finite() && current.lower(j).is_finite() {
            count += 1;
        }
        if !start.upper(j).is_finite() && current.upper(j).is_finite() {
            count += 1;
        }
    }
    Ok(count)
}

/// Infinite-phase progress: the fraction of eventually-finite bounds that
/// are already finite. `None` when no bound ever leaves infinity.
pub fn progress_inf(
    start: &BoundsState,
    current: &BoundsState,
    n_total: usize,
) -> Result<Option<f64>, ProgressError> {
    if n_total == 0 {
        return Ok(None);
    }
    let n_current = count_infinite_reductions(start, current)?;
    Ok(Some(n_current as f64 / n_total as f64))
}

/// Scores one bound's travelled fraction of the path from the weakest
/// value to the limit. Zero while the bound is infinite or has not passed
/// the weakest value; one at the limit.
pub fn bound_score(
    reference: ExtReal,
    current: ExtReal,
    limit: ExtReal,
    side: BoundSide,
) -> Result<f64, ProgressError> {
    if !current.is_finite() {
        return Ok(0.0);
    }
    // Zero-width path: the weakest value already equals the limit, so
    // there is nothing to travel.
    if reference == limit {
        return Ok(0.0);
    }
    if !reference.is_finite() {
        return Ok(0.0);
    }
    let Some(l) = limit.finite_value() else {
        return Err(ProgressError::ScoreInfiniteLimit {
            variable: None,
            side,
        });
    };
    let r = reference.finite_value().expect("checked finite");
    let c = current.finite_value().expect("checked finite");
    let (below, above) = match side {
        BoundSide::Lower => (r, l),
        BoundSide::Upper => (l, r),
    };
    if c < below - SCORE_SLACK || c > above + SCORE_SLACK {
        return Err(ProgressError::ScoreOutOfRange {
            variable: None,
            side,
            reference: r,
            current: c,
            limit: l,
        });
    }
    let travelled = match side {
        BoundSide::Lower => c - r,
        BoundSide::Upper => r - c,
    };
    if travelled <= 0.0 {
        return Ok(0.0);
    }
    Ok((travelled / (l - r).abs()).clamp(0.0, 1.0))
}

/// Finite-phase score of a state: raw sum of bound scores and, when the
/// reference admits any scored bound, the 0..100 normalized value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinScore {
    pub raw: f64,
    pub normalized: Option<f64>,
}

pub fn progress_fin(
    reference: &ProgressReference,
    current: &BoundsState,
) -> Result<FinScore, ProgressError> {
    let n = reference.limit.lowers().len();
    if current.lowers().len() != n {
        return Err(ProgressError::DimensionMismatch {
            left: current.lowers().len(),
            right: n,
        });
    }
    let mut raw = 0.0;
    for j in 0..n {
        for side in [BoundSide::Lower, BoundSide::Upper] {
            if reference.is_excluded(j, side) {
                continue;
            }
            let (weak, cur, lim) = match side {
                BoundSide::Lower => (
                    reference.weakest.lower(j),
                    current.lower(j),
                    reference.limit.lower(j),
                ),
                BoundSide::Upper => (
                    reference.weakest.upper(j),
                    current.upper(j),
                    reference.limit.upper(j),
                ),
            };
            raw += bound_score(weak, cur, lim, side).map_err(|e| match e {
                ProgressError::ScoreOutOfRange {
                    side,
                    reference,
                    current,
                    limit,
                    ..
                } => ProgressError::ScoreOutOfRange {
                    variable: Some(j),
                    side,
                    reference,
                    current,
                    limit,
                },
                ProgressError::ScoreInfiniteLimit { side, .. } => {
                    ProgressError::ScoreInfiniteLimit {
                        variable: Some(j),
                        side,
                    }
                }
                other => other,
            })?;
        }
    }
    let normalized = if reference.max_score > 0 {
        Some(100.0 * raw / reference.max_score as f64)
    } else {
        None
    };
    Ok(FinScore { raw, normalized })
}

/// State scores taken after one round of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgressSnapshot {
    pub round: usize,
    /// Cumulative wall-clock time at the end of the round, from the
    /// timing pass.
    pub time_ns: u64,
    pub n_current: usize,
    pub p_inf: Option<f64>,
    pub p_fin_raw: f64,
    pub p_fin_norm: Option<f64>,
}

/// One point of a normalized curve. `time` and `progress` are on the
/// 0..100 reference scale; `raw_time_ns` keeps the cumulative wall clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub round: usize,
    pub raw_time_ns: u64,
    pub time: f64,
    pub progress: f64,
}

/// A normalized progress curve for one phase of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgressCurve {
    pub samples: Vec<CurveSample>,
    /// Per executed round: whether the round made any infinite reduction.
    /// Indexed by round number minus one.
    pub round_infinite_reductions: Vec<bool>,
    /// True when fewer than two rounds left only the degenerate
    /// (0,0) -> (100,100) segment.
    pub trivial: bool,
}

impl ProgressCurve {
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.time, s.progress)).collect()
    }

    /// Total raw run time, i.e. the raw time of the last sample.
    pub fn final_raw_time_ns(&self) -> u64 {
        self.samples.last().map(|s| s.raw_time_ns).unwrap_or(0)
    }
}

/// Builds the normalized curve for one phase, or `None` when the phase is
/// undefined for the instance (nothing to measure in that phase).
///
/// Normalization order is fixed: drop the second-to-last round sample,
/// then collapse plateaus of equal score keeping each plateau's first
/// sample (the final sample is always kept), then prepend the origin and
/// rescale time so the last round lands at 100.
pub fn normalize_curve(
    snapshots: &[ProgressSnapshot],
    trace: &PropagationTrace,
    phase: Phase,
) -> Result<Option<ProgressCurve>, ProgressError> {
    if snapshots.len() != trace.total_rounds() {
        return Err(ProgressError::SnapshotTraceMismatch {
            snapshots: snapshots.len(),
            rounds: trace.total_rounds(),
        });
    }
    let score = |s: &ProgressSnapshot| -> Option<f64> {
        match phase {
            Phase::Infinite => s.p_inf.map(|v| v * 100.0),
            Phase::Finite => s.p_fin_norm,
        }
    };
    let flags: Vec<bool> = trace
        .rounds
        .iter()
        .map(|r| r.infinite_reductions > 0)
        .collect();
    // Whether the phase is defined is a property of the reference, so it
    // is constant across snapshots; the first one decides.
    match snapshots.first() {
        None => {
            return Ok(Some(ProgressCurve {
                samples: trivial_samples(0, 1),
                round_infinite_reductions: flags,
                trivial: true,
            }))
        }
        Some(first) => {
            if score(first).is_none() {
                return Ok(None);
            }
        }
    }
    let mut entries: Vec<(usize, u64, f64)> = snapshots
        .iter()
        .map(|s| (s.round, s.time_ns, score(s).expect("phase checked defined")))
        .collect();
    let k = entries.len();
    if k < 2 {
        let last = entries.last().expect("k is 1 here");
        return Ok(Some(ProgressCurve {
            samples: trivial_samples(last.0, last.1),
            round_infinite_reductions: flags,
            trivial: true,
        }));
    }
    // The last round never changes anything at a fixed point, so its
    // predecessor carries the same score; drop the predecessor so the
    // plateau pass cannot eat the final sample's left neighbor instead.
    entries.remove(k - 2);
    let mut kept: Vec<(usize, u64, f64)> = Vec::with_capacity(entries.len());
    if entries.len() >= 2 {
        kept.push(entries[0]);
        for e in &entries[1..entries.len() - 1] {
            if e.2 != kept.last().expect("nonempty").2 {
                kept.push(*e);
            }
        }
        kept.push(*entries.last().expect("nonempty"));
    } else {
        kept = entries;
    }
    let total_time = kept.last().expect("nonempty").1;
    debug_assert!(
        total_time > 0,
        "round durations are clamped to at least 1ns"
    );
    let mut samples = Vec::with_capacity(kept.len() + 1);
    samples.push(CurveSample {
        round: 0,
        raw_time_ns: 0,
        time: 0.0,
        progress: 0.0,
    });
    for (round, t, s) in kept {
        samples.push(CurveSample {
            round,
            raw_time_ns: t,
            time: 100.0 * t as f64 / total_time as f64,
            progress: s,
        });
    }
    Ok(Some(ProgressCurve {
        samples,
        round_infinite_reductions: flags,
        trivial: false,
    }))
}

fn trivial_samples(last_round: usize, last_time_ns: u64) -> Vec<CurveSample> {
    vec![
        CurveSample {
            round: 0,
            raw_time_ns: 0,
            time: 0.0,
            progress: 0.0,
        },
        CurveSample {
            round: last_round,
            raw_time_ns: last_time_ns.max(1),
            time: 100.0,
            progress: 100.0,
        },
    ]
}

/// A fully measured run: per-round snapshots with merged wall-clock times
/// and the normalized curve of each defined phase.
#[derive(Debug, Clone)]
pub struct MeasuredRun {
    pub snapshots: Vec<ProgressSnapshot>,
    pub trace: PropagationTrace,
    pub reference: ProgressReference,
    pub finite: Option<ProgressCurve>,
    pub infinite: Option<ProgressCurve>,
    /// True when the run changed no bound at all, so the curves carry no
    /// information about the instance.
    pub no_measurements: bool,
}

/// Measures one run of `config` on `instance`.
///
/// The reference limit is always computed with fixed-point stopping so
/// tolerance-mode runs are scored against the true limit. The scoring
/// pass and the timing pass must produce bit-identical change sequences;
/// a mismatch means the engine lost determinism and is an error.
pub fn measure_run(
    instance: &ProblemInstance,
    config: &PropagationConfig,
) -> Result<MeasuredRun, ProgressError> {
    config.validate()?;
    let weakest = compute_weakest_bounds(instance, weakest::DEFAULT_MAX_ITERATIONS);
    let limit_config = PropagationConfig {
        stop_mode: StopMode::Fixpoint,
        ..config.clone()
    };
    let (limit, limit_trace) = propagate_to_fixpoint(instance, &limit_config)?;
    if limit.is_infeasible() {
        return Err(ProgressError::Infeasible {
            trace: Box::new(limit_trace),
        });
    }
    if !limit_trace.fixpoint_reached {
        return Err(ProgressError::FixpointNotReached {
            rounds: limit_trace.total_rounds(),
        });
    }
    let reference = ProgressReference::new(instance, weakest, limit)?;
    let start = BoundsState::starting(instance);

    // Scoring pass: evaluate both phase scores after every round.
    let mut runner = Runner::new(instance, config)?;
    let mut snapshots = Vec::new();
    while let Some(stats) = runner.step() {
        let round = stats.round;
        let state = runner.state();
        if state.is_infeasible() {
            let (_, trace) = runner.finish();
            return Err(ProgressError::Infeasible {
                trace: Box::new(trace),
            });
        }
        let n_current = count_infinite_reductions(&start, state)?;
        let p_inf = progress_inf(&start, state, reference.n_total)?;
        let fin = progress_fin(&reference, state)?;
        snapshots.push(ProgressSnapshot {
            round,
            time_ns: 0,
            n_current,
            p_inf,
            p_fin_raw: fin.raw,
            p_fin_norm: fin.normalized,
        });
    }
    let (_, scoring_trace) = runner.finish();

    // Timing pass: identical run without instrumentation between rounds.
    let (_, timing_trace) = propagate_to_fixpoint(instance, config)?;
    if let Some(round) = first_divergence(&scoring_trace, &timing_trace) {
        return Err(ProgressError::PassMismatch { round });
    }

    let mut cumulative = 0u64;
    for (snap, round) in snapshots.iter_mut().zip(timing_trace.rounds.iter()) {
        cumulative += round.duration_ns;
        snap.time_ns = cumulative;
    }

    let finite = normalize_curve(&snapshots, &timing_trace, Phase::Finite)?;
    let infinite = normalize_curve(&snapshots, &timing_trace, Phase::Infinite)?;
    let no_measurements = timing_trace.total_changes() == 0;
    Ok(MeasuredRun {
        snapshots,
        trace: timing_trace,
        reference,
        finite,
        infinite,
        no_measurements,
    })
}

/// First round where the two traces disagree on the change sequence, if
/// any. Bound values are compared exactly.
fn first_divergence(a: &PropagationTrace, b: &PropagationTrace) -> Option<usize> {
    if a.rounds.len() != b.rounds.len() {
        return Some(a.rounds.len().min(b.rounds.len()) + 1);
    }
    for (ra, rb) in a.rounds.iter().zip(b.rounds.iter()) {
        if ra.changes != rb.changes {
            return Some(ra.round);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LinearConstraint, VariableDomain};
    use crate::propagate::{RoundStats, Variant};

    fn ext(v: f64) -> ExtReal {
        ExtReal::new(v).unwrap()
    }

    /// x0 <= 4 via 2*x0 <= 8; x1 <= x0 + 1. Limit uppers (4, 5), weakest
    /// uppers (4, 5) reached in one deduction each from the weakest state.
    fn pair_instance() -> ProblemInstance {
        let domains = vec![
            VariableDomain::continuous(ext(0.0), ExtReal::PosInf).unwrap(),
            VariableDomain::continuous(ext(0.0), ExtReal::PosInf).unwrap(),
        ];
        let constraints = vec![
            LinearConstraint::new(vec![(0, 2.0)], ExtReal::NegInf, ext(8.0)).unwrap(),
            LinearConstraint::new(vec![(0, -1.0), (1, 1.0)], ExtReal::NegInf, ext(1.0)).unwrap(),
        ];
        ProblemInstance::new(domains, constraints).unwrap()
    }

    /// Three-variable chain whose weakest uppers (9, 6, +inf) differ from
    /// the limit uppers (7, 4, 2): x0 <= x1 + 3, x1 <= x2 + 2, x2 <= 2.
    fn chain_instance() -> ProblemInstance {
        let domains = vec![
            VariableDomain::continuous(ext(0.0), ExtReal::PosInf).unwrap(),
            VariableDomain::continuous(ext(0.0), ExtReal::PosInf).unwrap(),
            VariableDomain::continuous(ext(0.0), ext(4.0)).unwrap(),
        ];
        let constraints = vec![
            LinearConstraint::new(vec![(0, 1.0), (1, -1.0)], ExtReal::NegInf, ext(3.0)).unwrap(),
            LinearConstraint::new(vec![(1, 1.0), (2, -1.0)], ExtReal::NegInf, ext(2.0)).unwrap(),
            LinearConstraint::new(vec![(2, 1.0)], ExtReal::NegInf, ext(2.0)).unwrap(),
        ];
        ProblemInstance::new(domains, constraints).unwrap()
    }

    fn chain_reference() -> (ProblemInstance, ProgressReference) {
        let instance = chain_instance();
        let weakest = compute_weakest_bounds(&instance, weakest::DEFAULT_MAX_ITERATIONS);
        let (limit, trace) =
            propagate_to_fixpoint(&instance, &PropagationConfig::default()).unwrap();
        assert!(trace.fixpoint_reached);
        let reference = ProgressReference::new(&instance, weakest, limit).unwrap();
        (instance, reference)
    }

    #[test]
    fn chain_reference_constants() {
        let (_, reference) = chain_reference();
        // Uppers of x0 and x1 start infinite and end finite.
        assert_eq!(reference.n_total(), 2);
        // Weakest uppers (9, 6, 2 via rounding of the x2 row? no rounding:
        // x2's upper starts finite at 4 so it keeps 4) vs limit (7, 4, 2):
        // x0 upper, x1 upper, and x2 upper all differ from the weakest
        // state, so three sides carry score.
        assert_eq!(reference.weakest().upper(0), ext(9.0));
        assert_eq!(reference.weakest().upper(1), ext(6.0));
        assert_eq!(reference.weakest().upper(2), ext(4.0));
        assert_eq!(reference.limit().upper(0), ext(7.0));
        assert_eq!(reference.limit().upper(1), ext(4.0));
        assert_eq!(reference.limit().upper(2), ext(2.0));
        assert_eq!(reference.max_score(), 3);
        assert!(reference.excluded().is_empty());
    }

    #[test]
    fn bound_score_examples() {
        // Upper bound travelling 9 -> 7: halfway at 8.
        assert_eq!(
            bound_score(ext(9.0), ext(8.0), ext(7.0), BoundSide::Upper).unwrap(),
            0.5
        );
        assert_eq!(
            bound_score(ext(9.0), ext(7.0), ext(7.0), BoundSide::Upper).unwrap(),
            1.0
        );
        // Still infinite: no progress.
        assert_eq!(
            bound_score(ext(9.0), ExtReal::PosInf, ext(7.0), BoundSide::Upper).unwrap(),
            0.0
        );
        // Zero-width path.
        assert_eq!(
            bound_score(ext(7.0), ext(7.0), ext(7.0), BoundSide::Upper).unwrap(),
            0.0
        );
        // Lower bound travelling -1 -> 3.
        assert_eq!(
            bound_score(ext(-1.0), ext(2.0), ext(3.0), BoundSide::Lower).unwrap(),
            0.75
        );
        // Current weaker than the weakest value beyond the slack is a
        // contract violation; within the slack it clamps to zero.
        assert!(bound_score(ext(9.0), ext(9.5), ext(7.0), BoundSide::Upper).is_err());
        assert_eq!(
            bound_score(ext(9.0), ext(9.0 + 5e-10), ext(7.0), BoundSide::Upper).unwrap(),
            0.0
        );
    }

    #[test]
    fn bound_score_contract_violation() {
        // Current strictly beyond the limit by more than the slack.
        let err = bound_score(ext(9.0), ext(6.0), ext(7.0), BoundSide::Upper).unwrap_err();
        assert!(matches!(err, ProgressError::ScoreOutOfRange { .. }));
    }

    #[test]
    fn chain_midpoint_scores_half() {
        let (instance, reference) = chain_reference();
        // State with uppers (8, 5, 3): each side is halfway.
        let lowers = vec![ext(0.0); 3];
        let uppers = vec![ext(8.0), ext(5.0), ext(3.0)];
        let state = BoundsState::new(lowers, uppers).unwrap();
        let fin = progress_fin(&reference, &state).unwrap();
        assert!((fin.raw - 1.5).abs() < 1e-12);
        assert!((fin.normalized.unwrap() - 50.0).abs() < 1e-12);
        let start = BoundsState::starting(&instance);
        let p = progress_inf(&start, &state, reference.n_total())
            .unwrap()
            .unwrap();
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn progress_undefined_when_nothing_moves() {
        // Fully finite instance with no deduction at all: both phases
        // undefined.
        let domains = vec![VariableDomain::continuous(ext(0.0), ext(1.0)).unwrap()];
        let constraints =
            vec![LinearConstraint::new(vec![(0, 1.0)], ExtReal::NegInf, ext(5.0)).unwrap()];
        let instance = ProblemInstance::new(domains, constraints).unwrap();
        let run = measure_run(&instance, &PropagationConfig::default()).unwrap();
        assert!(run.no_measurements);
        assert_eq!(run.reference.n_total(), 0);
        assert_eq!(run.reference.max_score(), 0);
        assert!(run.infinite.is_none());
        assert!(run.finite.is_none());
    }

    fn snapshot(round: usize, time_ns: u64, norm: f64) -> ProgressSnapshot {
        ProgressSnapshot {
            round,
            time_ns,
            n_current: 0,
            p_inf: None,
            p_fin_raw: 0.0,
            p_fin_norm: Some(norm),
        }
    }

    fn synthetic_trace(rounds: usize) -> PropagationTrace {
        let mut trace = PropagationTrace::default();
        for round in 1..=rounds {
            trace.rounds.push(RoundStats {
                round,
                changes: Vec::new(),
                infinite_reductions: 0,
                duration_ns: 1,
            });
        }
        trace.fixpoint_reached = true;
        trace
    }

    #[test]
    fn normalize_drops_second_to_last_then_rescales() {
        // Scores 40, 100, 100 at 10ms, 20ms, 21ms: the 20ms sample is the
        // second-to-last round and is dropped before anything else.
        let snaps = vec![
            snapshot(1, 10_000_000, 40.0),
            snapshot(2, 20_000_000, 100.0),
            snapshot(3, 21_000_000, 100.0),
        ];
        let curve = normalize_curve(&snaps, &synthetic_trace(3), Phase::Finite)
            .unwrap()
            .unwrap();
        assert!(!curve.trivial);
        let pts = curve.points();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[0], (0.0, 0.0));
        assert!((pts[1].0 - 100.0 * 10.0 / 21.0).abs() < 1e-9);
        assert_eq!(pts[1].1, 40.0);
        assert_eq!(pts[2], (100.0, 100.0));
        assert_eq!(curve.final_raw_time_ns(), 21_000_000);
    }

    #[test]
    fn normalize_two_rounds_gives_single_segment() {
        let snaps = vec![snapshot(1, 5_000_000, 100.0), snapshot(2, 6_000_000, 100.0)];
        let curve = normalize_curve(&snaps, &synthetic_trace(2), Phase::Finite)
            .unwrap()
            .unwrap();
        assert!(!curve.trivial);
        assert_eq!(curve.points(), vec![(0.0, 0.0), (100.0, 100.0)]);
        assert_eq!(curve.final_raw_time_ns(), 6_000_000);
    }

    #[test]
    fn normalize_collapses_plateaus_keeping_first() {
        // Scores 20, 20, 20, 60, 100, 100 over six rounds. Round 5 (the
        // second-to-last) goes first; the 20-plateau keeps only round 1.
        let snaps = vec![
            snapshot(1, 10, 20.0),
            snapshot(2, 20, 20.0),
            snapshot(3, 30, 20.0),
            snapshot(4, 40, 60.0),
            snapshot(5, 50, 100.0),
            snapshot(6, 60, 100.0),
        ];
        let curve = normalize_curve(&snaps, &synthetic_trace(6), Phase::Finite)
            .unwrap()
            .unwrap();
        let rounds: Vec<usize> = curve.samples.iter().map(|s| s.round).collect();
        assert_eq!(rounds, vec![0, 1, 4, 6]);
        let progress: Vec<f64> = curve.samples.iter().map(|s| s.progress).collect();
        assert_eq!(progress, vec![0.0, 20.0, 60.0, 100.0]);
    }

    #[test]
    fn normalize_never_collapses_final_sample() {
        // A plateau that reaches the final sample: 40, 100, 100, 100.
        // Round 3 is removed as second-to-last; rounds 2 and 4 share the
        // score but the final sample must survive, so both stay.
        let snaps = vec![
            snapshot(1, 10, 40.0),
            snapshot(2, 20, 100.0),
            snapshot(3, 30, 100.0),
            snapshot(4, 40, 100.0),
        ];
        let curve = normalize_curve(&snaps, &synthetic_trace(4), Phase::Finite)
            .unwrap()
            .unwrap();
        let rounds: Vec<usize> = curve.samples.iter().map(|s| s.round).collect();
        assert_eq!(rounds, vec![0, 1, 2, 4]);
        let progress: Vec<f64> = curve.samples.iter().map(|s| s.progress).collect();
        assert_eq!(progress, vec![0.0, 40.0, 100.0, 100.0]);
    }

    #[test]
    fn normalize_undefined_phase_is_none() {
        let snaps = vec![
            ProgressSnapshot {
                round: 1,
                time_ns: 10,
                n_current: 0,
                p_inf: None,
                p_fin_raw: 0.0,
                p_fin_norm: None,
            },
            ProgressSnapshot {
                round: 2,
                time_ns: 20,
                n_current: 0,
                p_inf: None,
                p_fin_raw: 0.0,
                p_fin_norm: None,
            },
        ];
        assert!(normalize_curve(&snaps, &synthetic_trace(2), Phase::Finite)
            .unwrap()
            .is_none());
        assert!(
            normalize_curve(&snaps, &synthetic_trace(2), Phase::Infinite)
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn normalize_rejects_mismatched_trace() {
        let snaps = vec![snapshot(1, 10, 50.0)];
        let err = normalize_curve(&snaps, &synthetic_trace(3), Phase::Finite).unwrap_err();
        assert!(matches!(err, ProgressError::SnapshotTraceMismatch { .. }));
    }

    #[test]
    fn measure_run_produces_monotone_curves() {
        for instance in [pair_instance(), chain_instance()] {
            for variant in [Variant::Immediate, Variant::Deferred] {
                let config = PropagationConfig::with_variant(variant);
                let run = measure_run(&instance, &config).unwrap();
                assert!(!run.no_measurements);
                for curve in [run.finite.as_ref(), run.infinite.as_ref()]
                    .into_iter()
                    .flatten()
                {
                    let pts = curve.points();
                    assert_eq!(pts.first().copied(), Some((0.0, 0.0)));
                    let last = pts.last().copied().unwrap();
                    assert_eq!(last.0, 100.0);
                    assert!((last.1 - 100.0).abs() < 1e-9);
                    for w in pts.windows(2) {
                        assert!(w[1].0 > w[0].0, "time strictly increasing: {pts:?}");
                        assert!(w[1].1 >= w[0].1, "progress non-decreasing: {pts:?}");
                    }
                }
                assert_eq!(
                    run.trace.total_rounds(),
                    run.snapshots.len(),
                    "one snapshot per executed round"
                );
                // Times merged from the timing pass are cumulative.
                for w in run.snapshots.windows(2) {
                    assert!(w[1].time_ns > w[0].time_ns);
                }
            }
        }
    }

    #[test]
    fn measure_run_scores_are_deterministic() {
        let instance = chain_instance();
        let config = PropagationConfig::default();
        let a = measure_run(&instance, &config).unwrap();
        let b = measure_run(&instance, &config).unwrap();
        let score_seq = |r: &MeasuredRun| -> Vec<(usize, Option<f64>, f64)> {
            r.snapshots
                .iter()
                .map(|s| (s.n_current, s.p_inf, s.p_fin_raw))
                .collect()
        };
        assert_eq!(score_seq(&a), score_seq(&b));
        assert_eq!(a.trace.total_rounds(), b.trace.total_rounds());
    }

    #[test]
    fn measure_run_rejects_infeasible() {
        let domains = vec![VariableDomain::continuous(ext(5.0), ExtReal::PosInf).unwrap()];
        let constraints =
            vec![LinearConstraint::new(vec![(0, 1.0)], ExtReal::NegInf, ext(1.0)).unwrap()];
        let instance = ProblemInstance::new(domains, constraints).unwrap();
        let err = measure_run(&instance, &PropagationConfig::default()).unwrap_err();
        assert!(matches!(err, ProgressError::Infeasible { .. }));
    }

    #[test]
    fn measure_run_rejects_unreached_fixpoint() {
        // Amplifying pair that tightens forever: x0 <= x1 - 1, x1 <= x0 - 1
        // walks both uppers down without converging.
        let domains = vec![
            VariableDomain::continuous(ExtReal::NegInf, ext(0.0)).unwrap(),
            VariableDomain::continuous(ExtReal::NegInf, ext(0.0)).unwrap(),
        ];
        let constraints = vec![
            LinearConstraint::new(vec![(0, 1.0), (1, -1.0)], ExtReal::NegInf, ext(-1.0)).unwrap(),
            LinearConstraint::new(vec![(1, 1.0), (0, -1.0)], ExtReal::NegInf, ext(-1.0)).unwrap(),
        ];
        let instance = ProblemInstance::new(domains, constraints).unwrap();
        let config = PropagationConfig {
            max_rounds: 20,
            ..PropagationConfig::default()
        };
        let err = measure_run(&instance, &config).unwrap_err();
        assert!(matches!(
            err,
            ProgressError::FixpointNotReached { rounds: 20 }
        ));
    }
}
