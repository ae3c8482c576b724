//! Seeded random instances plus structure-preserving transformations.
//!
//! Values are drawn from small integer grids so that hand inspection of a
//! failing case stays feasible and near-tie tolerance noise is rare.

use propmeter::propagate::propagate_to_fixpoint;
use propmeter::{
    measure_run, ExtReal, LinearConstraint, ProblemInstance, PropagationConfig, VariableDomain,
    Variant,
};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::oracle::{random_update_fixpoint, OracleOutcome};

fn fin(v: f64) -> ExtReal {
    ExtReal::new(v).expect("generated values are finite")
}

#[derive(Clone, Copy, Debug)]
pub struct GeneratorOptions {
    pub min_vars: usize,
    pub max_vars: usize,
    pub min_constraints: usize,
    pub max_constraints: usize,
    /// Probability that a variable is integral.
    pub integer_prob: f64,
    /// Probability that each side of a variable domain is infinite,
    /// independently per side.
    pub infinite_bound_prob: f64,
}

impl Default for GeneratorOptions {
    fn default() -> Self {
        GeneratorOptions {
            min_vars: 2,
            max_vars: 8,
            min_constraints: 1,
            max_constraints: 8,
            integer_prob: 0.3,
            infinite_bound_prob: 0.4,
        }
    }
}

impl GeneratorOptions {
    /// Options biased towards infinite starting bounds, for tests about
    /// the first finite value a bound takes.
    pub fn mostly_unbounded() -> Self {
        GeneratorOptions {
            infinite_bound_prob: 0.85,
            ..Default::default()
        }
    }
}

/// Draws an instance from `opts`. Bounds and sides are small integers;
/// coefficients come from {-3..3} without zero.
pub fn random_instance<R: Rng>(rng: &mut R, opts: &GeneratorOptions) -> ProblemInstance {
    let n = rng.gen_range(opts.min_vars..=opts.max_vars);
    let m = rng.gen_range(opts.min_constraints..=opts.max_constraints);

    let mut domains = Vec::with_capacity(n);
    for _ in 0..n {
        let is_integer = rng.gen_bool(opts.integer_prob);
        let base: i64 = rng.gen_range(-10..=5);
        let width: i64 = rng.gen_range(0..=12);
        let lower = if rng.gen_bool(opts.infinite_bound_prob) {
            ExtReal::NegInf
        } else {
            fin(base as f64)
        };
        let upper = if rng.gen_bool(opts.infinite_bound_prob) {
            ExtReal::PosInf
        } else {
            fin((base + width) as f64)
        };
        domains
            .push(VariableDomain::new(lower, upper, is_integer).expect("ordered integer bounds"));
    }

    let mut vars: Vec<usize> = (0..n).collect();
    let mut constraints = Vec::with_capacity(m);
    for _ in 0..m {
        let k = rng.gen_range(1..=n.min(4));
        vars.shuffle(rng);
        let terms: Vec<(usize, f64)> = vars[..k]
            .iter()
            .map(|&j| {
                let mut c = 0i64;
                while c == 0 {
                    c = rng.gen_range(-3..=3);
                }
                (j, c as f64)
            })
            .collect();
        let b: i64 = rng.gen_range(-15..=15);
        let (lhs, rhs) = match rng.gen_range(0..4) {
            0 => (ExtReal::NegInf, fin(b as f64)),
            1 => (fin(b as f64), ExtReal::PosInf),
            2 => {
                let w: i64 = rng.gen_range(0..=10);
                (fin(b as f64), fin((b + w) as f64))
            }
            _ => (fin(b as f64), fin(b as f64)),
        };
        constraints.push(LinearConstraint::new(terms, lhs, rhs).expect("valid generated row"));
    }

    ProblemInstance::new(domains, constraints).expect("valid generated instance")
}

/// Like [`random_instance`], biased towards infinite starting bounds.
pub fn unbounded_instance<R: Rng>(rng: &mut R) -> ProblemInstance {
    random_instance(rng, &GeneratorOptions::mostly_unbounded())
}

fn concludes(instance: &ProblemInstance, variant: Variant) -> bool {
    match propagate_to_fixpoint(instance, &PropagationConfig::with_variant(variant)) {
        Ok((state, trace)) => state.is_infeasible() || trace.fixpoint_reached,
        Err(_) => false,
    }
}

/// Draws instances until one concludes (fixed point or proven infeasible,
/// never the round cap) under both variants and under a single-update
/// probe of the oracle. Amplifying cycles that tighten forever in ever
/// smaller steps are rare in the grid used here but do occur.
pub fn concluding_instance<R: Rng>(rng: &mut R, opts: &GeneratorOptions) -> ProblemInstance {
    for _ in 0..10_000 {
        let instance = random_instance(rng, opts);
        if !concludes(&instance, Variant::Immediate) || !concludes(&instance, Variant::Deferred) {
            continue;
        }
        if let OracleOutcome::NoConvergence = random_update_fixpoint(&instance, rng, 400) {
            continue;
        }
        return instance;
    }
    panic!("no concluding instance found in 10000 draws");
}

/// Draws instances until [`measure_run`] succeeds for both variants,
/// i.e. the instance is feasible and both runs reach their fixed point.
pub fn measurable_instance<R: Rng>(rng: &mut R, opts: &GeneratorOptions) -> ProblemInstance {
    for _ in 0..10_000 {
        let instance = random_instance(rng, opts);
        let both = [Variant::Immediate, Variant::Deferred]
            .iter()
            .all(|&v| measure_run(&instance, &PropagationConfig::with_variant(v)).is_ok());
        if both {
            return instance;
        }
    }
    panic!("no measurable instance found in 10000 draws");
}

/// Rebuilds `instance` with its constraints reordered by `order`, which
/// must be a permutation of `0..num_constraints`.
pub fn permuted_instance(instance: &ProblemInstance, order: &[usize]) -> ProblemInstance {
    assert_eq!(
        order.len(),
        instance.num_constraints(),
        "order must cover every constraint"
    );
    let constraints: Vec<LinearConstraint> = order
        .iter()
        .map(|&i| instance.constraint(i).clone())
        .collect();
    ProblemInstance::new(instance.domains().to_vec(), constraints)
        .expect("permutation preserves validity")
}

fn scale(value: ExtReal, factor: f64) -> ExtReal {
    match value {
        ExtReal::Finite(v) => fin(v * factor),
        inf => inf,
    }
}

/// Randomly rescales every finite number in `instance` without changing
/// any sign or any finite/infinite classification: one positive factor
/// per variable (drawn from {1, 2} for integer variables so bounds stay
/// integral), one per constraint side pair (keeping side order), and one
/// per coefficient.
pub fn sign_preserving_perturbation<R: Rng>(
    instance: &ProblemInstance,
    rng: &mut R,
) -> ProblemInstance {
    let domains: Vec<VariableDomain> = instance
        .domains()
        .iter()
        .map(|d| {
            let f = if d.is_integer() {
                *[1.0, 2.0].choose(rng).expect("non-empty choices")
            } else {
                rng.gen_range(0.5..2.0)
            };
            VariableDomain::new(scale(d.lower(), f), scale(d.upper(), f), d.is_integer())
                .expect("positive scaling keeps bounds ordered")
        })
        .collect();
    let constraints: Vec<LinearConstraint> = instance
        .constraints()
        .iter()
        .map(|c| {
            let g = rng.gen_range(0.5..2.0);
            let terms: Vec<(usize, f64)> = c
                .terms()
                .iter()
                .map(|&(j, a)| (j, a * rng.gen_range(0.5..2.0)))
                .collect();
            LinearConstraint::new(terms, scale(c.lhs(), g), scale(c.rhs(), g))
                .expect("positive scaling keeps sides ordered")
        })
        .collect();
    ProblemInstance::new(domains, constraints).expect("perturbation preserves validity")
}
