//! Bounds tightening for linear constraint systems over mixed-integer
//! variables with possibly unbounded domains, plus instrumentation that
//! measures how much tightening progress a run has made.
//!
//! The crate is organized around a small pipeline:
//!
//! * [`model`] holds the problem representation: extended-real bounds,
//!   linear constraints with two-sided activities, and validated instances.
//! * [`mps`] and [`text`] read instances from files.
//! * [`propagate`] runs rounds of bound tightening until a fixed point,
//!   in either an immediate (sequential) or deferred (round-synchronous)
//!   variant, and records a per-round trace.
//! * [`weakest`] computes the weakest finite bounds any tightening run can
//!   produce, which anchor the progress scores.
//! * [`progress`] scores intermediate states against those anchors and
//!   builds normalized progress curves from measured runs.
//! * [`stall`] differentiates progress curves and flags runs that slow
//!   down prematurely even though more progress is coming.

pub mod activity;
pub mod ext;
pub mod model;
pub mod mps;
pub mod progress;
pub mod propagate;
pub mod stall;
pub mod text;
pub mod weakest;

pub use ext::{ExtReal, ExtRealError, INF_THRESHOLD};
pub use model::{LinearConstraint, ModelError, ProblemInstance, VariableDomain};
pub use progress::{measure_run, MeasuredRun, Phase, ProgressCurve, ProgressError};
pub use propagate::{
    fixpoints_agree, propagate_round, propagate_to_fixpoint, BoundChange, BoundSide, BoundsState,
    InfeasibleWitness, PropagationConfig, PropagationTrace, RoundStats, Runner, StopMode, Variant,
};
pub use stall::{detect_stall, StallParams, StallReport};
pub use weakest::{compute_weakest_bounds, WeakestBounds};
