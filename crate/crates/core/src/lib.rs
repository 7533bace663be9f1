//! Budget-controlled black-box optimization.
//!
//! The central optimizer ([`yo::run`]) spends a fixed number of objective
//! evaluations in two phases: a multi-chain MCMC burn-in that explores, then
//! a hybrid phase where every proposal is greedily refined and passed through
//! a simulated-annealing acceptance test with reheating, while a blacklist of
//! poor regions lets proposals be skipped without spending evaluations.
//!
//! Reference optimizers ([`baselines`]) share the same budget ledger and run
//! record, and [`stats`] holds the statistics used to compare them.
//!
//! ```
//! use yo_core::{run, FunctionObjective, YoConfig};
//!
//! let f = FunctionObjective::composite5d();
//! let cfg = YoConfig { budget: 150, seed: 7, ..YoConfig::default() };
//! let record = run(&f, &cfg).unwrap();
//! assert!(record.evaluations_used <= 150);
//! assert_eq!(record.trace.last().unwrap().1, record.best_value);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod blacklist;
pub mod budget;
pub mod error;
pub mod objective;
pub mod record;
pub mod refine;
pub mod rng;
pub mod space;
pub mod stats;
pub mod tsp;
pub mod yo;

pub use baselines::{run_baseline, Algorithm, BaselineConfig};
pub use blacklist::{Blacklist, ValueHistory};
pub use budget::{BudgetLedger, Charge, Phase};
pub use error::{Error, Result};
pub use objective::{Counted, FunctionObjective, Objective};
pub use record::{ChainLog, Event, RunRecord};
pub use refine::{greedy_refine, RefineParams};
pub use rng::RngStream;
pub use space::{mcmc_propose, Candidate, Position, ProposalParams, SearchSpace};
pub use tsp::{generate_tsp, tour_length, TspInstance, TspObjective};
pub use yo::{run, YoConfig};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/search-spaces.md")]
    mod search_spaces {}
    #[doc = include_str!("../../../book/src/budget.md")]
    mod budget {}
    #[doc = include_str!("../../../book/src/hybrid-optimizer.md")]
    mod hybrid_optimizer {}
    #[doc = include_str!("../../../book/src/blacklist.md")]
    mod blacklist {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/statistics.md")]
    mod statistics {}
}
