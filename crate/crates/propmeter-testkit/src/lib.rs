//! Shared test support for the workspace: small named fixtures, seeded
//! random instance generators, and independent oracles that recompute
//! engine results by slower, structurally different methods.
//!
//! Everything here is dev-only. The oracles deliberately avoid the
//! engine's round orchestration and incremental bookkeeping so that a bug
//! there cannot cancel out in the comparison:
//!
//! * [`oracle::random_update_fixpoint`] reaches a fixed point by applying
//!   single bound updates in shuffled order, with no rounds at all.
//! * [`oracle::corner_activity`] finds activities by enumerating all
//!   bound corners with large sentinel values instead of summing selected
//!   endpoints.
//! * [`oracle::fd_weights`] derives finite-difference weights from the
//!   general interpolation recurrence rather than closed-form stencils.

pub mod fixtures;
pub mod generator;
pub mod oracle;

pub use fixtures::{
    bounded_pair, difference_chain, fixture_corpus, half_integer, infeasible_box, open_pair,
};
pub use generator::{
    concluding_instance, measurable_instance, permuted_instance, random_instance,
    sign_preserving_perturbation, unbounded_instance, GeneratorOptions,
};
pub use oracle::{
    corner_activity, corner_residual, fd_weights, first_finite_values, random_update_fixpoint,
    OracleOutcome,
};
