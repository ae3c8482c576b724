//! Experiment harness over the propagation library: measured runs with
//! CSV export, speedup-at-progress comparison between variants,
//! fixed-point agreement checks, stall-threshold sweeps, and
//! weakest-bound tables. The binary in this crate is a thin argument
//! parser over these functions.

pub mod analyze;
pub mod compare;
pub mod instances;
pub mod report;
pub mod run;

use std::path::PathBuf;

use anyhow::{bail, Result};
use propmeter::{PropagationConfig, StallParams, Variant};

/// Default wall-clock floor for comparison times: one microsecond.
/// Measured times below it say more about clock granularity than about
/// the algorithm, so they are clamped (and flagged) before dividing.
pub const DEFAULT_TIME_FLOOR_NS: f64 = 1000.0;

/// The decile grid used for speedup-at-progress unless overridden.
pub fn default_progress_grid() -> Vec<f64> {
    (1..=10).map(|k| f64::from(k) * 10.0).collect()
}

/// Everything a command needs: resolved instance paths, the engine
/// configuration, and reporting knobs.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub paths: Vec<PathBuf>,
    pub variants: Vec<Variant>,
    /// Base engine configuration; the variant field is overridden per run.
    pub propagation: PropagationConfig,
    pub out_dir: PathBuf,
    pub progress_grid: Vec<f64>,
    pub stall_grid: Vec<StallParams>,
    pub workers: usize,
    pub floor_ns: f64,
}

impl ExperimentConfig {
    pub fn new(paths: Vec<PathBuf>, out_dir: PathBuf) -> Self {
        ExperimentConfig {
            paths,
            variants: vec![Variant::Immediate, Variant::Deferred],
            propagation: PropagationConfig::default(),
            out_dir,
            progress_grid: default_progress_grid(),
            stall_grid: propmeter::stall::default_sweep_grid(),
            workers: 1,
            floor_ns: DEFAULT_TIME_FLOOR_NS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths.is_empty() {
            bail!("at least one instance file is required");
        }
        if self.variants.is_empty() {
            bail!("at least one variant is required");
        }
        self.propagation.validate()?;
        if self.progress_grid.is_empty() {
            bail!("the progress grid must not be empty");
        }
        for &x in &self.progress_grid {
            if !(x > 0.0 && x <= 100.0) {
                bail!("progress levels must lie in (0, 100], got {x}");
            }
        }
        if self.workers == 0 {
            bail!("worker count must be at least 1");
        }
        if !self.floor_ns.is_finite() || self.floor_ns < 0.0 {
            bail!("the time floor must be finite and non-negative");
        }
        Ok(())
    }
}

/// Success/failure tally that maps onto the exit-code contract:
/// 0 when nothing failed, 1 for partial failures, 2 when everything did.
/// (Invalid configuration exits 3 before any work is attempted.)
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Outcomes {
    pub successes: usize,
    pub failures: usize,
}

impl Outcomes {
    pub fn success(&mut self) {
        self.successes += 1;
    }

    pub fn failure(&mut self) {
        self.failures += 1;
    }

    pub fn exit_code(self) -> u8 {
        if self.failures == 0 {
            0
        } else if self.successes > 0 {
            1
        } else {
            2
        }
    }
}
