//! Independent oracles: slower recomputations of engine results that
//! share as little structure with the engine as the math allows.

use propmeter::activity::{ActivityBound, ActivityKind};
use propmeter::propagate::{
    bound_candidates, constraint_status, ConstraintStatus, PropagationTrace,
    DEFAULT_ACCEPT_ABS_TOL, DEFAULT_INTEGRALITY_EPS,
};
use propmeter::{BoundSide, BoundsState, ExtReal, LinearConstraint, ProblemInstance};
use rand::seq::SliceRandom;
use rand::Rng;

/// Result of the single-update fixpoint oracle.
#[derive(Clone, Debug, PartialEq)]
pub enum OracleOutcome {
    Fixpoint(BoundsState),
    Infeasible,
    /// Still changing after the pass budget; the instance tightens
    /// forever (or too slowly to tell apart).
    NoConvergence,
}

fn accepts(current: ExtReal, candidate: ExtReal, side: BoundSide, tol: f64) -> bool {
    let improves = match side {
        BoundSide::Lower => candidate > current,
        BoundSide::Upper => candidate < current,
    };
    improves
        && match (current, candidate) {
            (ExtReal::Finite(cur), ExtReal::Finite(cand)) => (cand - cur).abs() > tol,
            _ => true,
        }
}

fn crossed(lower: ExtReal, upper: ExtReal, tol: f64) -> bool {
    match (lower, upper) {
        (ExtReal::Finite(l), ExtReal::Finite(u)) => l > u + tol,
        (l, u) => l > u,
    }
}

/// Drives the bound system to a fixed point by applying one candidate at
/// a time in shuffled order, with no rounds and no per-round batching.
/// Rows that are infeasible at the start are caught by an upfront status
/// scan; any infeasibility reached later shows up as crossed bounds the
/// moment the offending row's candidates are revisited, because updates
/// only ever tighten.
pub fn random_update_fixpoint<R: Rng>(
    instance: &ProblemInstance,
    rng: &mut R,
    max_passes: usize,
) -> OracleOutcome {
    let start = BoundsState::starting(instance);
    for cons in instance.constraints() {
        if constraint_status(cons, &start) == ConstraintStatus::Infeasible {
            return OracleOutcome::Infeasible;
        }
    }

    let mut lower = start.lowers().to_vec();
    let mut upper = start.uppers().to_vec();
    let mut items: Vec<(usize, usize)> = instance
        .constraints()
        .iter()
        .enumerate()
        .flat_map(|(ci, c)| c.terms().iter().map(move |&(j, _)| (ci, j)))
        .collect();
    let tol = DEFAULT_ACCEPT_ABS_TOL;

    for _ in 0..max_passes {
        items.shuffle(rng);
        let mut changed = false;
        for &(ci, j) in &items {
            let state = BoundsState::new(lower.clone(), upper.clone())
                .expect("oracle vectors stay the same length");
            let cand = bound_candidates(
                instance.constraint(ci),
                &state,
                j,
                instance.domain(j).is_integer(),
                DEFAULT_INTEGRALITY_EPS,
            )
            .expect("items only pair constraints with their own variables");
            if accepts(lower[j], cand.lower, BoundSide::Lower, tol) {
                lower[j] = cand.lower;
                changed = true;
            }
            if accepts(upper[j], cand.upper, BoundSide::Upper, tol) {
                upper[j] = cand.upper;
                changed = true;
            }
            if crossed(lower[j], upper[j], tol) {
                return OracleOutcome::Infeasible;
            }
        }
        if !changed {
            let state = BoundsState::new(lower, upper).expect("vectors stay the same length");
            return OracleOutcome::Fixpoint(state);
        }
    }
    OracleOutcome::NoConvergence
}

/// Large stand-in for an infinite bound when ranking corners. Far above
/// any value the generators or fixtures produce, far below overflow.
const SENTINEL: f64 = 1e12;

fn sentinel_value(bound: ExtReal) -> f64 {
    match bound {
        ExtReal::Finite(v) => v,
        ExtReal::NegInf => -SENTINEL,
        ExtReal::PosInf => SENTINEL,
    }
}

/// Extremal activity by corner enumeration: rank all 2^k lower/upper
/// corners using sentinel values for infinities, then reclassify the
/// winning corner exactly. `exclude` drops one variable's term, which
/// turns the activity into that variable's residual.
fn corner_extreme(
    constraint: &LinearConstraint,
    bounds: &BoundsState,
    exclude: Option<usize>,
    kind: ActivityKind,
) -> ActivityBound {
    let terms: Vec<(usize, f64)> = constraint
        .terms()
        .iter()
        .copied()
        .filter(|&(j, _)| Some(j) != exclude)
        .collect();
    let k = terms.len();
    assert!(
        k <= 20,
        "corner enumeration is exponential in the term count"
    );

    let corner_bound = |mask: usize, idx: usize, j: usize| -> ExtReal {
        if mask & (1 << idx) == 0 {
            bounds.lower(j)
        } else {
            bounds.upper(j)
        }
    };

    let mut best_mask = 0usize;
    let mut best_value = f64::INFINITY;
    let sign = match kind {
        ActivityKind::Min => 1.0,
        ActivityKind::Max => -1.0,
    };
    for mask in 0..(1usize << k) {
        let value: f64 = terms
            .iter()
            .enumerate()
            .map(|(idx, &(j, a))| a * sentinel_value(corner_bound(mask, idx, j)))
            .sum();
        if sign * value < best_value {
            best_value = sign * value;
            best_mask = mask;
        }
    }

    let mut finite_part = 0.0;
    let mut pos = 0u32;
    let mut neg = 0u32;
    for (idx, &(j, a)) in terms.iter().enumerate() {
        match corner_bound(best_mask, idx, j) {
            ExtReal::Finite(v) => finite_part += a * v,
            ExtReal::PosInf => {
                if a > 0.0 {
                    pos += 1
                } else {
                    neg += 1
                }
            }
            ExtReal::NegInf => {
                if a > 0.0 {
                    neg += 1
                } else {
                    pos += 1
                }
            }
        }
    }
    match (pos > 0, neg > 0) {
        (true, true) => ActivityBound::Mixed,
        (true, false) => ActivityBound::PosInf,
        (false, true) => ActivityBound::NegInf,
        (false, false) => ActivityBound::Finite(finite_part),
    }
}

/// Extremal activity of `constraint` found by corner enumeration.
pub fn corner_activity(
    constraint: &LinearConstraint,
    bounds: &BoundsState,
    kind: ActivityKind,
) -> ActivityBound {
    corner_extreme(constraint, bounds, None, kind)
}

/// Extremal residual (activity without `variable`) by corner enumeration.
pub fn corner_residual(
    constraint: &LinearConstraint,
    bounds: &BoundsState,
    variable: usize,
    kind: ActivityKind,
) -> ActivityBound {
    corner_extreme(constraint, bounds, Some(variable), kind)
}

/// Finite-difference weights for the `m`-th derivative at `z` over the
/// distinct nodes `x`, from the classic recurrence on Newton-form
/// interpolation coefficients. Exact for polynomials up to degree
/// `x.len() - 1`, so it reproduces any specific stencil on the same
/// nodes.
pub fn fd_weights(z: f64, x: &[f64], m: usize) -> Vec<f64> {
    let n = x.len();
    assert!(n > m, "need more nodes than the derivative order");
    let mut c = vec![vec![0.0; m + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// First finite value each bound takes during a run, per side, in trace
/// order. Entries stay `None` for bounds that never moved from infinite
/// to finite (including bounds that started finite).
pub fn first_finite_values(
    num_vars: usize,
    trace: &PropagationTrace,
) -> (Vec<Option<ExtReal>>, Vec<Option<ExtReal>>) {
    let mut lower = vec![None; num_vars];
    let mut upper = vec![None; num_vars];
    for round in &trace.rounds {
        for change in &round.changes {
            if !change.is_infinite_reduction() {
                continue;
            }
            let slot = match change.side {
                BoundSide::Lower => &mut lower[change.variable],
                BoundSide::Upper => &mut upper[change.variable],
            };
            if slot.is_none() {
                *slot = Some(change.new);
            }
        }
    }
    (lower, upper)
}
