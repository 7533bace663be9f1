//! Experiment harness for the `yo-core` optimizers.
//!
//! An [`ExperimentSpec`] names a problem, an evaluation budget, a list of
//! seeds and a list of optimizer variants. Running it executes every
//! `(variant, seed)` pair, writes each run's record, trace and (for tours)
//! best tour to disk, and summarizes the final values in a [`ResultTable`]
//! whose statistics come from [`yo_core::stats`].
//!
//! ```no_run
//! use yo_bench::{run_ablation, ExperimentSpec, RunOptions};
//!
//! let spec = ExperimentSpec::ablation(150, 30);
//! let report = run_ablation(&spec, RunOptions::default()).unwrap();
//! for row in &report.table.rows {
//!     println!("{} {:.2} ± {:.2}", row.variant, row.mean, row.std);
//! }
//! ```

pub mod error;
pub mod experiment;
pub mod external;
pub mod problem;
pub mod spec;

pub use error::{Error, Result};
pub use experiment::{
    run_ablation, run_continuous_comparison, run_experiment, run_single, run_tsp_suite, PairwiseRow, Reference, Report,
    ResultTable, RunOptions, RunOutcome, Sample, SummaryRow,
};
pub use external::{read_external, ExternalRow};
pub use problem::{Delayed, Problem};
pub use spec::{ExperimentSpec, OptimizerSpec, RunConfig};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/experiments.md")]
mod book_experiments {}
