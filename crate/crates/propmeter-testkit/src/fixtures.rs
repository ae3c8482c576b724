//! Hand-built instances with known propagation behaviour.
//!
//! Each constructor documents the values the engine is expected to reach
//! so integration tests can assert against them without re-deriving.

use propmeter::{ExtReal, LinearConstraint, ProblemInstance, VariableDomain};

fn fin(v: f64) -> ExtReal {
    ExtReal::new(v).expect("fixture values are finite")
}

/// Two bounded continuous variables coupled by one two-sided row:
/// x0 in [0, 3], x1 in [0, 10], 1 <= x0 + x1 <= 4.
///
/// Propagation tightens x1 to [0, 4] and reaches the fixed point in two
/// rounds (second round confirms). Starting activity is [0, 13]. With
/// domains x0 in [0, 1], x1 in [1, 2] the same row is redundant.
pub fn bounded_pair() -> ProblemInstance {
    ProblemInstance::new(
        vec![
            VariableDomain::continuous(fin(0.0), fin(3.0)).expect("ordered bounds"),
            VariableDomain::continuous(fin(0.0), fin(10.0)).expect("ordered bounds"),
        ],
        vec![
            LinearConstraint::new(vec![(0, 1.0), (1, 1.0)], fin(1.0), fin(4.0))
                .expect("valid constraint"),
        ],
    )
    .expect("valid instance")
}

/// Two variables open above, one sum cap: x0 >= 0, x1 >= 1, x0 + x1 <= 5.
///
/// Both uppers go from infinite to finite in one round: u = (4, 5). The
/// weakest uppers equal the fixed point here, and both tightened bounds
/// start infinite, so the infinite-phase denominator is 2.
pub fn open_pair() -> ProblemInstance {
    ProblemInstance::new(
        vec![
            VariableDomain::continuous(fin(0.0), ExtReal::PosInf).expect("ordered bounds"),
            VariableDomain::continuous(fin(1.0), ExtReal::PosInf).expect("ordered bounds"),
        ],
        vec![
            LinearConstraint::new(vec![(0, 1.0), (1, 1.0)], ExtReal::NegInf, fin(5.0))
                .expect("valid constraint"),
        ],
    )
    .expect("valid instance")
}

/// A dependency chain with a redundant middle row:
/// x0, x1 >= 0; x0 - x1 <= 3; x1 <= 6; x1 <= 4.
///
/// The sequential variant discovers u1 = 6 and then u1 = 4 within round
/// one and u0 = 7 in round two; the deferred variant keeps only u1 = 4
/// from round one. Weakest uppers are (9, 6), so of the two finite-phase
/// sides that can move, the state u = (8, 5) scores exactly half.
pub fn difference_chain() -> ProblemInstance {
    ProblemInstance::new(
        vec![
            VariableDomain::continuous(fin(0.0), ExtReal::PosInf).expect("ordered bounds"),
            VariableDomain::continuous(fin(0.0), ExtReal::PosInf).expect("ordered bounds"),
        ],
        vec![
            LinearConstraint::new(vec![(0, 1.0), (1, -1.0)], ExtReal::NegInf, fin(3.0))
                .expect("valid constraint"),
            LinearConstraint::new(vec![(1, 1.0)], ExtReal::NegInf, fin(6.0))
                .expect("valid constraint"),
            LinearConstraint::new(vec![(1, 1.0)], ExtReal::NegInf, fin(4.0))
                .expect("valid constraint"),
        ],
    )
    .expect("valid instance")
}

/// One integer variable under a fractional cap: x in Z, 0 <= x <= 10,
/// 2x <= 7. Rounding tightens the upper bound to 3.
pub fn half_integer() -> ProblemInstance {
    ProblemInstance::new(
        vec![VariableDomain::integer(fin(0.0), fin(10.0)).expect("ordered bounds")],
        vec![
            LinearConstraint::new(vec![(0, 2.0)], ExtReal::NegInf, fin(7.0))
                .expect("valid constraint"),
        ],
    )
    .expect("valid instance")
}

/// An infeasible box: x in [0, 3] but 5 <= x. The very first status
/// check reports the conflict.
pub fn infeasible_box() -> ProblemInstance {
    ProblemInstance::new(
        vec![VariableDomain::continuous(fin(0.0), fin(3.0)).expect("ordered bounds")],
        vec![
            LinearConstraint::new(vec![(0, 1.0)], fin(5.0), ExtReal::PosInf)
                .expect("valid constraint"),
        ],
    )
    .expect("valid instance")
}

/// All five fixtures with stable short names, in a fixed order.
pub fn fixture_corpus() -> Vec<(&'static str, ProblemInstance)> {
    vec![
        ("bounded_pair", bounded_pair()),
        ("open_pair", open_pair()),
        ("difference_chain", difference_chain()),
        ("half_integer", half_integer()),
        ("infeasible_box", infeasible_box()),
    ]
}
