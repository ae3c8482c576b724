//! The weakest references really are weakest: no propagation run, under
//! any constraint order or variant, ever gives a bound a first finite
//! value weaker than its reference.

use propmeter::weakest::DEFAULT_MAX_ITERATIONS;
use propmeter::{
    compute_weakest_bounds, propagate_to_fixpoint, ExtReal, ProblemInstance, PropagationConfig,
    Variant, WeakestBounds,
};
use propmeter_testkit::{
    difference_chain, first_finite_values, open_pair, permuted_instance, unbounded_instance,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn all_orders(m: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, remaining: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..remaining.len() {
            let item = remaining.remove(i);
            prefix.push(item);
            extend(prefix, remaining, out);
            prefix.pop();
            remaining.insert(i, item);
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), &mut (0..m).collect(), &mut out);
    out
}

/// Runs `instance` under one constraint order and both variants and
/// checks every first finite bound value against the references.
fn assert_dominated(
    instance: &ProblemInstance,
    weakest: &WeakestBounds,
    order: &[usize],
    tag: &str,
) {
    let permuted = permuted_instance(instance, order);
    for variant in [Variant::Immediate, Variant::Deferred] {
        let (_, trace) =
            propagate_to_fixpoint(&permuted, &PropagationConfig::with_variant(variant)).unwrap();
        let (first_lower, first_upper) = first_finite_values(permuted.num_vars(), &trace);
        for j in 0..permuted.num_vars() {
            if let Some(ExtReal::Finite(v)) = first_lower[j] {
                match weakest.lower(j) {
                    ExtReal::Finite(w) => assert!(
                        v >= w - 1e-9,
                        "{tag} {variant:?} x{j}: first lower {v} is weaker than reference {w}"
                    ),
                    other => panic!("{tag} x{j}: finite first lower but reference {other:?}"),
                }
            }
            if let Some(ExtReal::Finite(v)) = first_upper[j] {
                match weakest.upper(j) {
                    ExtReal::Finite(w) => assert!(
                        v <= w + 1e-9,
                        "{tag} {variant:?} x{j}: first upper {v} is weaker than reference {w}"
                    ),
                    other => panic!("{tag} x{j}: finite first upper but reference {other:?}"),
                }
            }
        }
    }
}

#[test]
fn fixture_references_are_exact_and_dominate_all_orders() {
    let chain = difference_chain();
    let weakest = compute_weakest_bounds(&chain, DEFAULT_MAX_ITERATIONS);
    assert!(!weakest.cap_hit);
    let fin = |v: f64| ExtReal::new(v).unwrap();
    assert_eq!(weakest.uppers(), &[fin(9.0), fin(6.0)]);
    assert_eq!(weakest.lowers(), &[fin(0.0), fin(0.0)]);
    for order in all_orders(chain.num_constraints()) {
        assert_dominated(&chain, &weakest, &order, "chain");
    }

    let pair = open_pair();
    let weakest = compute_weakest_bounds(&pair, DEFAULT_MAX_ITERATIONS);
    assert_eq!(weakest.uppers(), &[fin(4.0), fin(5.0)]);
    assert_dominated(&pair, &weakest, &[0], "pair");
}

#[test]
fn weakest_references_ignore_constraint_order() {
    let chain = difference_chain();
    let reference = compute_weakest_bounds(&chain, DEFAULT_MAX_ITERATIONS);
    for order in all_orders(chain.num_constraints()) {
        let permuted = permuted_instance(&chain, &order);
        let w = compute_weakest_bounds(&permuted, DEFAULT_MAX_ITERATIONS);
        assert_eq!(w.lowers(), reference.lowers(), "order {order:?}");
        assert_eq!(w.uppers(), reference.uppers(), "order {order:?}");
    }
}

#[test]
fn random_runs_never_beat_the_references_to_a_weaker_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for case in 0..40 {
        // The references are only meaningful when their computation
        // settles, so instances that hit the weakening cap are redrawn.
        let (instance, weakest) = loop {
            let instance = unbounded_instance(&mut rng);
            let weakest = compute_weakest_bounds(&instance, DEFAULT_MAX_ITERATIONS);
            if !weakest.cap_hit {
                break (instance, weakest);
            }
        };
        let m = instance.num_constraints();
        let mut order: Vec<usize> = (0..m).collect();
        for round in 0..40 {
            order.shuffle(&mut rng);
            assert_dominated(
                &instance,
                &weakest,
                &order,
                &format!("case {case} order {round}"),
            );
        }
    }
}
