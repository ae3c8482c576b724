//! Round-based bound tightening.
//!
//! Each round visits every constraint and derives, per variable, the
//! tightest lower and upper bound the constraint's sides permit given the
//! residual activities of the other variables. Two traversal variants are
//! supported:
//!
//! * [`Variant::Immediate`]: accepted changes are written to the working
//!   state at once, so later constraints (and later terms of the same
//!   constraint) see them within the round.
//! * [`Variant::Deferred`]: all candidates are evaluated against the state
//!   frozen at round start; the strongest candidate per variable and side
//!   is applied at round end, ties going to the lowest constraint index.
//!   This emulates a round-synchronous (massively parallel) traversal.
//!
//! Both variants converge to the same fixed point; only the per-round
//! trajectory differs.

use std::time::Instant;

use thiserror::Error;

use crate::activity::{
    activity_residual, max_activity, min_activity, ActivityBound, ActivityError, ActivityKind,
};
use crate::ext::ExtReal;
use crate::model::{LinearConstraint, ProblemInstance};

pub const DEFAULT_MAX_ROUNDS: usize = 100;
pub const DEFAULT_SIGNIFICANCE_REL_TOL: f64 = 1e-3;
pub const DEFAULT_ACCEPT_ABS_TOL: f64 = 1e-9;
pub const DEFAULT_INTEGRALITY_EPS: f64 = 1e-6;
/// Default relative tolerance for [`fixpoints_agree`].
pub const DEFAULT_FIXPOINT_REL_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Immediate,
    Deferred,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Immediate => "immediate",
            Variant::Deferred => "deferred",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopMode {
    /// Stop at the first round with no accepted changes.
    Fixpoint,
    /// Additionally stop after a round whose changes were all relatively
    /// insignificant and reduced no infinite bound.
    Tolerance,
}

#[derive(Clone, Debug)]
pub struct PropagationConfig {
    pub variant: Variant,
    pub max_rounds: usize,
    /// Relative significance threshold used by [`StopMode::Tolerance`].
    pub significance_rel_tol: f64,
    /// A finite-to-finite change is accepted only if it improves the bound
    /// by more than this; infinite-to-finite reductions always count.
    pub accept_abs_tol: f64,
    /// Slack used when rounding candidates for integer variables.
    pub integrality_eps: f64,
    pub stop_mode: StopMode,
    /// Skip constraints whose activities prove them redundant. Disabling
    /// this only costs time; the fixed point is unchanged.
    pub status_checks: bool,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        PropagationConfig {
            variant: Variant::Immediate,
            max_rounds: DEFAULT_MAX_ROUNDS,
            significance_rel_tol: DEFAULT_SIGNIFICANCE_REL_TOL,
            accept_abs_tol: DEFAULT_ACCEPT_ABS_TOL,
            integrality_eps: DEFAULT_INTEGRALITY_EPS,
            stop_mode: StopMode::Fixpoint,
            status_checks: true,
        }
    }
}

impl PropagationConfig {
    pub fn with_variant(variant: Variant) -> Self {
        PropagationConfig {
            variant,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), PropagateError> {
        if self.max_rounds < 1 {
            return Err(PropagateError::Config {
                reason: "max_rounds must be at least 1".into(),
            });
        }
        if self.accept_abs_tol.is_nan() || self.accept_abs_tol < 0.0 {
            return Err(PropagateError::Config {
                reason: "accept_abs_tol must be non-negative".into(),
            });
        }
        if self.integrality_eps.is_nan() || self.integrality_eps < 0.0 {
            return Err(PropagateError::Config {
                reason: "integrality_eps must be non-negative".into(),
            });
        }
        if self.significance_rel_tol.is_nan() || self.significance_rel_tol <= 0.0 {
            return Err(PropagateError::Config {
                reason: "significance_rel_tol must be positive".into(),
            });
        }
        if self.stop_mode == StopMode::Tolerance && self.accept_abs_tol >= self.significance_rel_tol
        {
            return Err(PropagateError::Config {
                reason: "accept_abs_tol must be below significance_rel_tol in tolerance mode"
                    .into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PropagateError {
    #[error(transparent)]
    Activity(#[from] ActivityError),
    #[error("lower and upper bound vectors have different lengths ({lower} vs {upper})")]
    MismatchedBounds { lower: usize, upper: usize },
    #[error("states have different dimensions ({a} vs {b})")]
    DimensionMismatch { a: usize, b: usize },
    #[error("state dimension {state} does not match instance with {instance} variables")]
    WrongInstance { state: usize, instance: usize },
    #[error("starting state is already marked infeasible")]
    InfeasibleStart,
    #[error("invalid propagation config: {reason}")]
    Config { reason: String },
}

/// Why a state was marked infeasible.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InfeasibleWitness {
    /// This variable's working bounds crossed.
    Variable(usize),
    /// This constraint's activities prove it unsatisfiable.
    Constraint(usize),
}

/// Current lower and upper bounds for every variable.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsState {
    lower: Vec<ExtReal>,
    upper: Vec<ExtReal>,
    infeasible: Option<InfeasibleWitness>,
}

impl BoundsState {
    /// The starting bounds of an instance.
    pub fn starting(instance: &ProblemInstance) -> Self {
        BoundsState {
            lower: instance.domains().iter().map(|d| d.lower()).collect(),
            upper: instance.domains().iter().map(|d| d.upper()).collect(),
            infeasible: None,
        }
    }

    pub fn new(lower: Vec<ExtReal>, upper: Vec<ExtReal>) -> Result<Self, PropagateError> {
        if lower.len() != upper.len() {
            return Err(PropagateError::MismatchedBounds {
                lower: lower.len(),
                upper: upper.len(),
            });
        }
        Ok(BoundsState {
            lower,
            upper,
            infeasible: None,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self, variable: usize) -> ExtReal {
        self.lower[variable]
    }

    pub fn upper(&self, variable: usize) -> ExtReal {
        self.upper[variable]
    }

    pub fn lowers(&self) -> &[ExtReal] {
        &self.lower
    }

    pub fn uppers(&self) -> &[ExtReal] {
        &self.upper
    }

    pub fn is_infeasible(&self) -> bool {
        self.infeasible.is_some()
    }

    pub fn infeasible_witness(&self) -> Option<InfeasibleWitness> {
        self.infeasible
    }

    pub(crate) fn set_bound(&mut self, variable: usize, side: BoundSide, value: ExtReal) {
        match side {
            BoundSide::Lower => self.lower[variable] = value,
            BoundSide::Upper => self.upper[variable] = value,
        }
    }

    pub(crate) fn mark_infeasible(&mut self, witness: InfeasibleWitness) {
        if self.infeasible.is_none() {
            self.infeasible = Some(witness);
        }
    }

    /// Whether this variable's bounds have crossed, with `tol` slack on
    /// finite comparisons.
    fn crossed(&self, variable: usize, tol: f64) -> bool {
        match (self.lower[variable], self.upper[variable]) {
            (ExtReal::Finite(l), ExtReal::Finite(u)) => l > u + tol,
            (l, u) => l > u,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundSide {
    Lower,
    Upper,
}

impl BoundSide {
    pub fn name(self) -> &'static str {
        match self {
            BoundSide::Lower => "lower",
            BoundSide::Upper => "upper",
        }
    }
}

impl std::fmt::Display for BoundSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One accepted bound change.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundChange {
    pub variable: usize,
    pub side: BoundSide,
    pub old: ExtReal,
    pub new: ExtReal,
}

impl BoundChange {
    /// True when an infinite bound became finite.
    pub fn is_infinite_reduction(&self) -> bool {
        !self.old.is_finite() && self.new.is_finite()
    }

    /// `|new - old| / max(1, |old|)`; infinite for reductions from an
    /// infinite bound.
    pub fn relative_size(&self) -> f64 {
        match (self.old, self.new) {
            (ExtReal::Finite(o), ExtReal::Finite(n)) => (n - o).abs() / o.abs().max(1.0),
            _ => f64::INFINITY,
        }
    }
}

/// Per-round record: every accepted change plus timing.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundStats {
    /// 1-based round number.
    pub round: usize,
    pub changes: Vec<BoundChange>,
    /// Number of changes that turned an infinite bound finite.
    pub infinite_reductions: usize,
    pub duration_ns: u64,
}

/// Full record of a propagation run.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PropagationTrace {
    pub rounds: Vec<RoundStats>,
    /// True when the final round accepted no changes.
    pub fixpoint_reached: bool,
    /// True when the run stopped because the last round's changes were all
    /// below the significance threshold (tolerance stop mode only).
    pub stopped_by_tolerance: bool,
    /// True when the run stopped at the round cap with changes pending.
    pub hit_round_cap: bool,
    /// True when a fixed point was declared while some candidate still
    /// offered a positive improvement not exceeding `accept_abs_tol`; the
    /// mathematical fixed point may lie slightly beyond the final state.
    pub fixpoint_approximate: bool,
}

impl PropagationTrace {
    pub fn total_rounds(&self) -> usize {
        self.rounds.len()
    }

    /// Number of rounds that reduced at least one infinite bound.
    pub fn infinite_reduction_rounds(&self) -> usize {
        self.rounds
            .iter()
            .filter(|r| r.infinite_reductions > 0)
            .count()
    }

    pub fn total_changes(&self) -> usize {
        self.rounds.iter().map(|r| r.changes.len()).sum()
    }
}

/// Candidate bounds one constraint implies for one variable. Infinite
/// values are vacuous (no restriction in that direction).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundCandidates {
    pub lower: ExtReal,
    pub upper: ExtReal,
}

/// `(side - residual) / coef` in extended arithmetic. `vacuous` is
/// returned when the residual is mixed; same-signed infinite numerators
/// resolve to the side's infinity, which lands on `vacuous` as well once
/// divided.
fn side_candidate(side: ExtReal, residual: ActivityBound, coef: f64, vacuous: ExtReal) -> ExtReal {
    let numerator = match (side, residual) {
        (_, ActivityBound::Mixed) => return vacuous,
        (ExtReal::PosInf, _) => ExtReal::PosInf,
        (ExtReal::NegInf, _) => ExtReal::NegInf,
        (ExtReal::Finite(b), ActivityBound::Finite(r)) => {
            ExtReal::new(b - r).expect("difference of finite values is never NaN")
        }
        (ExtReal::Finite(_), ActivityBound::PosInf) => ExtReal::NegInf,
        (ExtReal::Finite(_), ActivityBound::NegInf) => ExtReal::PosInf,
    };
    match numerator {
        ExtReal::Finite(v) => ExtReal::new(v / coef).expect("finite quotient is never NaN"),
        inf => {
            if coef > 0.0 {
                inf
            } else {
                -inf
            }
        }
    }
}

/// Tightest bounds `constraint` implies for `variable` under `bounds`.
///
/// With a positive coefficient the lower candidate comes from the left
/// side against the max residual and the upper candidate from the right
/// side against the min residual; a negative coefficient swaps the roles.
/// Candidates for integer variables are rounded inward with `eps` slack.
pub fn bound_candidates(
    constraint: &LinearConstraint,
    bounds: &BoundsState,
    variable: usize,
    is_integer: bool,
    integrality_eps: f64,
) -> Result<BoundCandidates, ActivityError> {
    let coef = constraint
        .coefficient(variable)
        .ok_or(ActivityError::VariableNotInConstraint { variable })?;
    let min_res = activity_residual(constraint, bounds, variable, ActivityKind::Min)?.value();
    let max_res = activity_residual(constraint, bounds, variable, ActivityKind::Max)?.value();

    let positive = coef > 0.0;
    let slack_vacuous = if positive {
        ExtReal::NegInf
    } else {
        ExtReal::PosInf
    };
    let surplus_vacuous = if positive {
        ExtReal::PosInf
    } else {
        ExtReal::NegInf
    };
    let slack = side_candidate(constraint.lhs(), max_res, coef, slack_vacuous);
    let surplus = side_candidate(constraint.rhs(), min_res, coef, surplus_vacuous);

    let (mut lower, mut upper) = if positive {
        (slack, surplus)
    } else {
        (surplus, slack)
    };
    if is_integer {
        if let ExtReal::Finite(v) = lower {
            lower =
                ExtReal::new((v - integrality_eps).ceil()).expect("rounded candidate is never NaN");
        }
        if let ExtReal::Finite(v) = upper {
            upper = ExtReal::new((v + integrality_eps).floor())
                .expect("rounded candidate is never NaN");
        }
    }
    Ok(BoundCandidates { lower, upper })
}

/// Classification of one constraint under the current bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintStatus {
    /// Satisfied by every point in the current box; tightening it cannot
    /// produce anything.
    Redundant,
    Active,
    /// No point in the current box satisfies it.
    Infeasible,
}

/// Activity-based constraint classification. Mixed activities permit no
/// deduction and classify as active.
pub fn constraint_status(constraint: &LinearConstraint, bounds: &BoundsState) -> ConstraintStatus {
    let min = min_activity(constraint, bounds).value().as_ext();
    let max = max_activity(constraint, bounds).value().as_ext();
    if let Some(min) = min {
        if min > constraint.rhs() {
            return ConstraintStatus::Infeasible;
        }
    }
    if let Some(max) = max {
        if constraint.lhs() > max {
            return ConstraintStatus::Infeasible;
        }
    }
    if let (Some(min), Some(max)) = (min, max) {
        if constraint.lhs() <= min && max <= constraint.rhs() {
            return ConstraintStatus::Redundant;
        }
    }
    ConstraintStatus::Active
}

enum Acceptance {
    Accept,
    /// Positive improvement within `accept_abs_tol`; rejected but recorded
    /// so a declared fixed point can be flagged approximate.
    SubTolerance,
    Reject,
}

fn judge(current: ExtReal, candidate: ExtReal, side: BoundSide, tol: f64) -> Acceptance {
    let improves = match side {
        BoundSide::Lower => candidate > current,
        BoundSide::Upper => candidate < current,
    };
    if !improves {
        return Acceptance::Reject;
    }
    match (current, candidate) {
        (ExtReal::Finite(cur), ExtReal::Finite(cand)) => {
            if (cand - cur).abs() > tol {
                Acceptance::Accept
            } else {
                Acceptance::SubTolerance
            }
        }
        // From an infinite bound (or to one) any improvement is accepted.
        _ => Acceptance::Accept,
    }
}

struct RoundOutcome {
    changes: Vec<BoundChange>,
    /// Some candidate improved a bound by a positive amount within tol.
    suppressed: bool,
}

fn immediate_round(
    instance: &ProblemInstance,
    state: &mut BoundsState,
    config: &PropagationConfig,
) -> RoundOutcome {
    let mut changes = Vec::new();
    let mut suppressed = false;
    'constraints: for (ci, cons) in instance.constraints().iter().enumerate() {
        match constraint_status(cons, state) {
            ConstraintStatus::Infeasible => {
                state.mark_infeasible(InfeasibleWitness::Constraint(ci));
                break 'constraints;
            }
            ConstraintStatus::Redundant if config.status_checks => continue,
            _ => {}
        }
        for &(j, _) in cons.terms() {
            let cand = bound_candidates(
                cons,
                state,
                j,
                instance.domain(j).is_integer(),
                config.integrality_eps,
            )
            .expect("term variables are always in the constraint");
            for (side, candidate) in [
                (BoundSide::Lower, cand.lower),
                (BoundSide::Upper, cand.upper),
            ] {
                let current = match side {
                    BoundSide::Lower => state.lower(j),
                    BoundSide::Upper => state.upper(j),
                };
                match judge(current, candidate, side, config.accept_abs_tol) {
                    Acceptance::Accept => {
                        state.set_bound(j, side, candidate);
                        changes.push(BoundChange {
                            variable: j,
                            side,
                            old: current,
                            new: candidate,
                        });
                        if state.crossed(j, config.accept_abs_tol) {
                            state.mark_infeasible(InfeasibleWitness::Variable(j));
                            break 'constraints;
                        }
                    }
                    Acceptance::SubTolerance => suppressed = true,
                    Acceptance::Reject => {}
                }
            }
        }
    }
    RoundOutcome {
        changes,
        suppressed,
    }
}

fn deferred_round(
    instance: &ProblemInstance,
    state: &mut BoundsState,
    config: &PropagationConfig,
) -> RoundOutcome {
    let frozen = state.clone();
    let n = instance.num_vars();
    // Strongest candidate per variable and side. Scanning constraints in
    // ascending index order with strict-improvement replacement makes ties
    // go to the lowest constraint index.
    let mut best_lower: Vec<Option<ExtReal>> = vec![None; n];
    let mut best_upper: Vec<Option<ExtReal>> = vec![None; n];
    let mut suppressed = false;
    for (ci, cons) in instance.constraints().iter().enumerate() {
        match constraint_status(cons, &frozen) {
            ConstraintStatus::Infeasible => {
                state.mark_infeasible(InfeasibleWitness::Constraint(ci));
                return RoundOutcome {
                    changes: Vec::new(),
                    suppressed,
                };
            }
            ConstraintStatus::Redundant if config.status_checks => continue,
            _ => {}
        }
        for &(j, _) in cons.terms() {
            let cand = bound_candidates(
                cons,
                &frozen,
                j,
                instance.domain(j).is_integer(),
                config.integrality_eps,
            )
            .expect("term variables are always in the constraint");
            match judge(
                frozen.lower(j),
                cand.lower,
                BoundSide::Lower,
                config.accept_abs_tol,
            ) {
                Acceptance::Accept => {
                    if best_lower[j].is_none_or(|b| cand.lower > b) {
                        best_lower[j] = Some(cand.lower);
                    }
                }
                Acceptance::SubTolerance => suppressed = true,
                Acceptance::Reject => {}
            }
            match judge(
                frozen.upper(j),
                cand.upper,
                BoundSide::Upper,
                config.accept_abs_tol,
            ) {
                Acceptance::Accept => {
                    if best_upper[j].is_none_or(|b| cand.upper < b) {
                        best_upper[j] = Some(cand.upper);
                    }
                }
                Acceptance::SubTolerance => suppressed = true,
                Acceptance::Reject => {}
            }
        }
    }
    let mut changes = Vec::new();
    for j in 0..n {
        if let Some(v) = best_lower[j] {
            let old = state.lower(j);
            state.set_bound(j, BoundSide::Lower, v);
            changes.push(BoundChange {
                variable: j,
                side: BoundSide::Lower,
                old,
                new: v,
            });
        }
        if let Some(v) = best_upper[j] {
            let old = state.upper(j);
            state.set_bound(j, BoundSide::Upper, v);
            changes.push(BoundChange {
                variable: j,
                side: BoundSide::Upper,
                old,
                new: v,
            });
        }
    }
    for j in 0..n {
        if state.crossed(j, config.accept_abs_tol) {
            state.mark_infeasible(InfeasibleWitness::Variable(j));
            break;
        }
    }
    RoundOutcome {
        changes,
        suppressed,
    }
}

fn run_round(
    instance: &ProblemInstance,
    state: &mut BoundsState,
    config: &PropagationConfig,
) -> RoundOutcome {
    match config.variant {
        Variant::Immediate => immediate_round(instance, state, config),
        Variant::Deferred => deferred_round(instance, state, config),
    }
}

/// Runs a single round on a copy of `state`.
pub fn propagate_round(
    instance: &ProblemInstance,
    state: &BoundsState,
    config: &PropagationConfig,
) -> Result<(BoundsState, RoundStats), PropagateError> {
    config.validate()?;
    if state.num_vars() != instance.num_vars() {
        return Err(PropagateError::WrongInstance {
            state: state.num_vars(),
            instance: instance.num_vars(),
        });
    }
    if state.is_infeasible() {
        return Err(PropagateError::InfeasibleStart);
    }
    let mut next = state.clone();
    let started = Instant::now();
    let outcome = run_round(instance, &mut next, config);
    let duration_ns = (started.elapsed().as_nanos() as u64).max(1);
    let infinite_reductions = outcome
        .changes
        .iter()
        .filter(|c| c.is_infinite_reduction())
        .count();
    let stats = RoundStats {
        round: 1,
        changes: outcome.changes,
        infinite_reductions,
        duration_ns,
    };
    Ok((next, stats))
}

/// Incremental round driver. Runs one round per [`Runner::step`] call and
/// applies the stopping rules, so callers can observe the state between
/// rounds. Timestamps are taken between rounds only, never inside the
/// constraint loop.
pub struct Runner<'a> {
    instance: &'a ProblemInstance,
    config: PropagationConfig,
    state: BoundsState,
    trace: PropagationTrace,
    done: bool,
}

impl<'a> Runner<'a> {
    pub fn new(
        instance: &'a ProblemInstance,
        config: &PropagationConfig,
    ) -> Result<Self, PropagateError> {
        config.validate()?;
        Ok(Runner {
            instance,
            config: config.clone(),
            state: BoundsState::starting(instance),
            trace: PropagationTrace::default(),
            done: false,
        })
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn state(&self) -> &BoundsState {
        &self.state
    }

    pub fn trace(&self) -> &PropagationTrace {
        &self.trace
    }

    /// Runs one more round and returns its stats, or `None` once a
    /// stopping rule has fired.
    pub fn step(&mut self) -> Option<&RoundStats> {
        if self.done {
            return None;
        }
        let round = self.trace.rounds.len() + 1;
        let started = Instant::now();
        let outcome = run_round(self.instance, &mut self.state, &self.config);
        let duration_ns = (started.elapsed().as_nanos() as u64).max(1);
        let infinite_reductions = outcome
            .changes
            .iter()
            .filter(|c| c.is_infinite_reduction())
            .count();
        let empty = outcome.changes.is_empty();
        let insignificant = infinite_reductions == 0
            && outcome
                .changes
                .iter()
                .all(|c| c.relative_size() < self.config.significance_rel_tol);
        self.trace.rounds.push(RoundStats {
            round,
            changes: outcome.changes,
            infinite_reductions,
            duration_ns,
        });
        if self.state.is_infeasible() {
            self.done = true;
        } else if empty {
            self.done = true;
            self.trace.fixpoint_reached = true;
            self.trace.fixpoint_approximate = outcome.suppressed;
        } else if self.config.stop_mode == StopMode::Tolerance && insignificant {
            self.done = true;
            self.trace.stopped_by_tolerance = true;
        } else if round == self.config.max_rounds {
            self.done = true;
            self.trace.hit_round_cap = true;
        }
        self.trace.rounds.last()
    }

    pub fn finish(self) -> (BoundsState, PropagationTrace) {
        (self.state, self.trace)
    }
}

/// Runs rounds until a stopping rule fires: an empty round (fixed point),
/// an insignificant round in tolerance mode, infeasibility, or the round
/// cap.
pub fn propagate_to_fixpoint(
    instance: &ProblemInstance,
    config: &PropagationConfig,
) -> Result<(BoundsState, PropagationTrace), PropagateError> {
    let mut runner = Runner::new(instance, config)?;
    while runner.step().is_some() {}
    Ok(runner.finish())
}

/// Whether two final states describe the same fixed point.
///
/// Infeasible states agree exactly with each other. Otherwise each bound
/// pair must be the same infinity or finite values within
/// `rel_tol * max(1, |a|)`, where `a` is the first state's value.
pub fn fixpoints_agree(
    a: &BoundsState,
    b: &BoundsState,
    rel_tol: f64,
) -> Result<bool, PropagateError> {
    if a.num_vars() != b.num_vars() {
        return Err(PropagateError::DimensionMismatch {
            a: a.num_vars(),
            b: b.num_vars(),
        });
    }
    if a.is_infeasible() || b.is_infeasible() {
        return Ok(a.is_infeasible() == b.is_infeasible());
    }
    let close = |x: ExtReal, y: ExtReal| match (x, y) {
        (ExtReal::Finite(x), ExtReal::Finite(y)) => (x - y).abs() <= rel_tol * x.abs().max(1.0),
        (x, y) => x == y,
    };
    for j in 0..a.num_vars() {
        if !close(a.lower(j), b.lower(j)) || !close(a.upper(j), b.upper(j)) {
            return Ok(false);
        }
    }
    Ok(true)
}
