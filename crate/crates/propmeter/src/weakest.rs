//! Weakest finite bounds.
//!
//! For every variable whose starting bound is infinite, this computes the
//! weakest finite value any round-based tightening run could assign first,
//! regardless of constraint traversal order. Starting finite bounds are
//! their own weakest value and never move. The result anchors finite
//! progress scores: no run can produce a first finite bound weaker than
//! these.
//!
//! The fixed point is found by a worklist sweep: all constraints start
//! marked; processing a constraint unmarks it; whenever a variable's
//! weakest bound weakens, every constraint containing that variable is
//! re-marked. Weakening can feed on itself through cycles, so the sweep
//! count is capped and the cap is reported.

use crate::ext::ExtReal;
use crate::model::ProblemInstance;
use crate::propagate::{bound_candidates, BoundsState, DEFAULT_INTEGRALITY_EPS};

pub const DEFAULT_MAX_ITERATIONS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct WeakestBounds {
    lower: Vec<ExtReal>,
    upper: Vec<ExtReal>,
    /// Full sweeps over the constraint list that were executed.
    pub iterations_used: usize,
    /// True when work remained at the sweep cap; the reported bounds may
    /// not have weakened fully.
    pub cap_hit: bool,
}

impl WeakestBounds {
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
}

/// Weakest-bounds computation with the marking worklist enabled.
pub fn compute_weakest_bounds(instance: &ProblemInstance, max_iterations: usize) -> WeakestBounds {
    compute_weakest_bounds_opts(instance, max_iterations, true)
}

/// As [`compute_weakest_bounds`], with the marking worklist optionally
/// disabled so every sweep visits every constraint. Produces identical
/// bounds; only the amount of work differs.
pub fn compute_weakest_bounds_opts(
    instance: &ProblemInstance,
    max_iterations: usize,
    use_marking: bool,
) -> WeakestBounds {
    let start = BoundsState::starting(instance);
    let mut working = start.clone();
    let m = instance.num_constraints();
    let mut marked = vec![true; m];
    let mut iterations = 0;

    while marked.iter().any(|&x| x) && iterations < max_iterations {
        iterations += 1;
        for ci in 0..m {
            if !marked[ci] {
                continue;
            }
            marked[ci] = false;
            let cons = instance.constraint(ci);
            for &(j, _) in cons.terms() {
                let cand = bound_candidates(
                    cons,
                    &working,
                    j,
                    instance.domain(j).is_integer(),
                    DEFAULT_INTEGRALITY_EPS,
                )
                .expect("term variables are always in the constraint");
                let mut weakened = false;
                // Only bounds that start infinite are eligible, and a
                // finite candidate replaces the current weakest value only
                // when it is weaker (or the current value is still
                // infinite).
                if start.lower(j).is_neg_inf() {
                    if let ExtReal::Finite(v) = cand.lower {
                        if !working.lower(j).is_finite() || ExtReal::Finite(v) < working.lower(j) {
                            working.set_bound(j, crate::propagate::BoundSide::Lower, cand.lower);
                            weakened = true;
                        }
                    }
                }
                if start.upper(j).is_pos_inf() {
                    if let ExtReal::Finite(v) = cand.upper {
                        if !working.upper(j).is_finite() || ExtReal::Finite(v) > working.upper(j) {
                            working.set_bound(j, crate::propagate::BoundSide::Upper, cand.upper);
                            weakened = true;
                        }
                    }
                }
                if weakened {
                    if use_marking {
                        for &k in instance.column(j) {
                            marked[k] = true;
                        }
                    } else {
                        // Emulate "everything depends on everything" so the
                        // loop keeps sweeping until nothing weakens.
                        for flag in marked.iter_mut() {
                            *flag = true;
                        }
                    }
                }
            }
        }
    }

    let cap_hit = marked.iter().any(|&x| x);
    WeakestBounds {
        lower: working.lowers().to_vec(),
        upper: working.uppers().to_vec(),
        iterations_used: iterations,
        cap_hit,
    }
}
