//! Constraint activities: the smallest and largest values the linear form
//! of a constraint can take over the current bounds.
//!
//! Infinite bound contributions are counted rather than folded into the
//! finite accumulator, so partially infinite sums stay well defined. A sum
//! holding both positive and negative infinite contributions renders as
//! [`ActivityBound::Mixed`]; no deduction may be drawn from it.
//!
//! Residual activities (a full activity with one term excluded) are always
//! recomputed by summation over the remaining terms in ascending variable
//! order. This keeps "residual of j" exactly equal to "activity of the
//! constraint with j's term deleted", bit for bit.

use thiserror::Error;

use crate::ext::ExtReal;
use crate::model::LinearConstraint;
use crate::propagate::BoundsState;

/// Running sum of term contributions with infinite parts counted apart.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Activity {
    finite_part: f64,
    pos_inf_count: u32,
    neg_inf_count: u32,
}

/// Rendered value of an [`Activity`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ActivityBound {
    Finite(f64),
    NegInf,
    PosInf,
    /// Contributions of both infinite signs are present; the sum carries
    /// no usable information.
    Mixed,
}

/// Which of the two activities of a constraint is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActivityKind {
    Min,
    Max,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ActivityError {
    #[error("variable {variable} does not appear in the constraint")]
    VariableNotInConstraint { variable: usize },
}

impl Activity {
    pub fn zero() -> Self {
        Activity::default()
    }

    /// Adds the contribution `coef * bound`. `coef` must be nonzero, which
    /// the constraint representation guarantees.
    pub fn add_term(&mut self, coef: f64, bound: ExtReal) {
        debug_assert!(coef != 0.0 && coef.is_finite());
        match bound {
            ExtReal::Finite(v) => self.finite_part += coef * v,
            ExtReal::PosInf => {
                if coef > 0.0 {
                    self.pos_inf_count += 1;
                } else {
                    self.neg_inf_count += 1;
                }
            }
            ExtReal::NegInf => {
                if coef > 0.0 {
                    self.neg_inf_count += 1;
                } else {
                    self.pos_inf_count += 1;
                }
            }
        }
    }

    /// Removes a previously added contribution. Counts never go negative
    /// for balanced add/remove pairs; an unbalanced removal is a caller
    /// bug. Note that removing finite contributions is subject to
    /// floating-point cancellation, which is why residuals used for
    /// deductions are recomputed by exclusion instead.
    pub fn remove_term(&mut self, coef: f64, bound: ExtReal) {
        debug_assert!(coef != 0.0 && coef.is_finite());
        match bound {
            ExtReal::Finite(v) => self.finite_part -= coef * v,
            ExtReal::PosInf => {
                if coef > 0.0 {
                    assert!(
                        self.pos_inf_count > 0,
                        "unbalanced removal of +inf contribution"
                    );
                    self.pos_inf_count -= 1;
                } else {
                    assert!(
                        self.neg_inf_count > 0,
                        "unbalanced removal of -inf contribution"
                    );
                    self.neg_inf_count -= 1;
                }
            }
            ExtReal::NegInf => {
                if coef > 0.0 {
                    assert!(
                        self.neg_inf_count > 0,
                        "unbalanced removal of -inf contribution"
                    );
                    self.neg_inf_count -= 1;
                } else {
                    assert!(
                        self.pos_inf_count > 0,
                        "unbalanced removal of +inf contribution"
                    );
                    self.pos_inf_count -= 1;
                }
            }
        }
    }

    pub fn pos_inf_count(&self) -> u32 {
        self.pos_inf_count
    }

    pub fn neg_inf_count(&self) -> u32 {
        self.neg_inf_count
    }

    pub fn value(&self) -> ActivityBound {
        match (self.pos_inf_count, self.neg_inf_count) {
            (0, 0) => ActivityBound::Finite(self.finite_part),
            (_, 0) => ActivityBound::PosInf,
            (0, _) => ActivityBound::NegInf,
            (_, _) => ActivityBound::Mixed,
        }
    }
}

impl ActivityBound {
    /// Extended-real view; `None` for [`ActivityBound::Mixed`]. Finite
    /// payloads canonicalize through the usual threshold.
    pub fn as_ext(self) -> Option<ExtReal> {
        match self {
            ActivityBound::Finite(v) => Some(ExtReal::new(v).expect("activity sums are never NaN")),
            ActivityBound::NegInf => Some(ExtReal::NegInf),
            ActivityBound::PosInf => Some(ExtReal::PosInf),
            ActivityBound::Mixed => None,
        }
    }
}

fn bound_for(kind: ActivityKind, coef: f64, lower: ExtReal, upper: ExtReal) -> ExtReal {
    // The minimizing corner takes the lower bound on positive coefficients
    // and the upper bound on negative ones; the maximizing corner mirrors.
    match kind {
        ActivityKind::Min => {
            if coef > 0.0 {
                lower
            } else {
                upper
            }
        }
        ActivityKind::Max => {
            if coef > 0.0 {
                upper
            } else {
                lower
            }
        }
    }
}

/// Activity of `constraint` over `bounds`, summed in term order.
pub fn activity(
    constraint: &LinearConstraint,
    bounds: &BoundsState,
    kind: ActivityKind,
) -> Activity {
    let mut acc = Activity::zero();
    for &(j, coef) in constraint.terms() {
        acc.add_term(
            coef,
            bound_for(kind, coef, bounds.lower(j), bounds.upper(j)),
        );
    }
    acc
}

pub fn min_activity(constraint: &LinearConstraint, bounds: &BoundsState) -> Activity {
    activity(constraint, bounds, ActivityKind::Min)
}

pub fn max_activity(constraint: &LinearConstraint, bounds: &BoundsState) -> Activity {
    activity(constraint, bounds, ActivityKind::Max)
}

/// Activity with `variable`'s term excluded, recomputed by summation over
/// the remaining terms in ascending variable order.
pub fn activity_residual(
    constraint: &LinearConstraint,
    bounds: &BoundsState,
    variable: usize,
    kind: ActivityKind,
) -> Result<Activity, ActivityError> {
    if constraint.coefficient(variable).is_none() {
        return Err(ActivityError::VariableNotInConstraint { variable });
    }
    let mut acc = Activity::zero();
    for &(j, coef) in constraint.terms() {
        if j == variable {
            continue;
        }
        acc.add_term(
            coef,
            bound_for(kind, coef, bounds.lower(j), bounds.upper(j)),
        );
    }
    Ok(acc)
}
