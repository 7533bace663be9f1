//! Reference optimizers.
//!
//! Every baseline draws evaluations through the same [`BudgetLedger`] and
//! [`Meter`] as the hybrid optimizer and returns a [`RunRecord`].

mod apso;
mod ga;
mod random;
mod restart;
mod sa;

use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::budget::{BudgetLedger, Meter, Phase, Tally};
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::record::{merge_traces, ChainLog, ConfigEcho, RunRecord};
use crate::rng::RngStream;
use crate::space::{Candidate, ProposalParams};

pub use apso::{apso_step, run_apso};
pub use ga::{order_crossover, run_ga};
pub use random::run_random_search;
pub use restart::run_two_opt_restart;
pub use sa::run_sa;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Sa,
    Ga,
    TwoOptRestart,
    RandomSearch,
    Apso,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::Sa, Algorithm::Ga, Algorithm::TwoOptRestart, Algorithm::RandomSearch, Algorithm::Apso];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sa => "sa",
            Algorithm::Ga => "ga",
            Algorithm::TwoOptRestart => "two_opt_restart",
            Algorithm::RandomSearch => "random_search",
            Algorithm::Apso => "apso",
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown baseline `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineConfig {
    pub algorithm: Algorithm,
    pub budget: u64,
    pub seed: u64,
    /// Annealing start temperature; `None` uses the spread of `pilot` random
    /// starting points, floored at 1.
    pub t0: Option<f64>,
    /// Geometric cooling factor per iteration, in `(0, 1]`.
    pub beta: f64,
    pub pilot: usize,
    pub proposal: ProposalParams,
    pub population_size: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub tournament_size: usize,
    /// Gaussian mutation sd as a fraction of each dimension's range.
    pub mutation_scale: f64,
    /// Coordinate-descent step for restarts on boxes.
    pub refine_step: f64,
    pub swarm_size: usize,
    pub attraction_beta: f64,
    pub noise_alpha: f64,
    pub noise_decay: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            algorithm: Algorithm::RandomSearch,
            budget: 150,
            seed: 0,
            t0: None,
            beta: 0.95,
            pilot: 4,
            proposal: ProposalParams::default(),
            population_size: 50,
            crossover_rate: 0.9,
            mutation_rate: 0.2,
            tournament_size: 3,
            mutation_scale: 0.1,
            refine_step: 0.05,
            swarm_size: 20,
            attraction_beta: 0.5,
            noise_alpha: 0.3,
            noise_decay: 0.97,
        }
    }
}

impl BaselineConfig {
    /// Defaults for `algorithm` at `budget`. Annealing cools slowly
    /// (`0.9995`) for budgets of a thousand evaluations or more and at
    /// `0.95` below that.
    pub fn new(algorithm: Algorithm, budget: u64, seed: u64) -> Self {
        let beta = if budget >= 1000 { 0.9995 } else { 0.95 };
        BaselineConfig { algorithm, budget, seed, beta, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.budget == 0 {
            return fail("budget must be positive".into());
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return fail(format!("beta must lie in (0, 1], got {}", self.beta));
        }
        if let Some(t0) = self.t0 {
            if !(t0 > 0.0) {
                return fail(format!("t0 must be positive, got {t0}"));
            }
        }
        for (name, rate) in [("crossover_rate", self.crossover_rate), ("mutation_rate", self.mutation_rate)] {
            if !(0.0..=1.0).contains(&rate) {
                return fail(format!("{name} must lie in [0, 1], got {rate}"));
            }
        }
        if self.population_size < 2 || self.swarm_size < 2 {
            return fail("population and swarm sizes must be at least 2".into());
        }
        if self.tournament_size == 0 {
            return fail("tournament_size must be positive".into());
        }
        if !(self.attraction_beta > 0.0 && self.attraction_beta <= 1.0) {
            return fail(format!("attraction_beta must lie in (0, 1], got {}", self.attraction_beta));
        }
        if !(self.noise_alpha >= 0.0) || !(self.noise_decay > 0.0 && self.noise_decay <= 1.0) {
            return fail("noise_alpha must be non-negative and noise_decay in (0, 1]".into());
        }
        if self.pilot == 0 {
            return fail("pilot must be positive".into());
        }
        self.proposal.validate()
    }
}

/// Runs the baseline selected by `cfg.algorithm`.
pub fn run_baseline(objective: &dyn Objective, cfg: &BaselineConfig) -> Result<RunRecord> {
    match cfg.algorithm {
        Algorithm::Sa => run_sa(objective, cfg),
        Algorithm::Ga => run_ga(objective, cfg),
        Algorithm::TwoOptRestart => run_two_opt_restart(objective, cfg),
        Algorithm::RandomSearch => run_random_search(objective, cfg),
        Algorithm::Apso => run_apso(objective, cfg),
    }
}

/// Budget, random stream and best-so-far bookkeeping shared by the baselines.
pub(crate) struct Session<'a> {
    objective: &'a dyn Objective,
    ledger: BudgetLedger,
    tally: Tally,
    pub rng: RngStream,
    pub best: Option<Candidate>,
    started: Instant,
    cfg: &'a BaselineConfig,
}

impl<'a> Session<'a> {
    pub fn new(objective: &'a dyn Objective, cfg: &'a BaselineConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Session {
            objective,
            ledger: BudgetLedger::flat(cfg.budget)?,
            tally: Tally::unlimited(),
            rng: RngStream::new(cfg.seed),
            best: None,
            started: Instant::now(),
            cfg,
        })
    }

    pub fn space(&self) -> &'a crate::space::SearchSpace {
        self.objective.space()
    }

    pub fn meter(&mut self) -> Meter<'_> {
        Meter::new(self.objective, &self.ledger, Phase::Hybrid, &mut self.tally)
    }

    pub fn remaining(&self) -> u64 {
        self.ledger.remaining()
    }

    /// Charges and evaluates; updates the best point.
    pub fn evaluate(&mut self, position: crate::space::Position) -> Option<Candidate> {
        use crate::budget::Evaluate;
        let v = self.meter().evaluate(&position)?;
        let c = Candidate::evaluated(position, v);
        self.observe(&c);
        Some(c)
    }

    pub fn observe(&mut self, c: &Candidate) {
        if self.best.as_ref().is_none_or(|b| c.value_or_inf() < b.value_or_inf()) {
            self.best = Some(c.clone());
        }
    }

    pub fn finish(self, chain: Option<ChainLog>) -> Result<RunRecord> {
        let best = self.best.ok_or_else(|| Error::Config("budget allowed no evaluation".into()))?;
        let used = self.ledger.used();
        Ok(RunRecord {
            algorithm: self.cfg.algorithm.name().into(),
            problem: self.objective.name().into(),
            seed: self.cfg.seed,
            budget: self.cfg.budget,
            best_value: best.value_or_inf(),
            best,
            evaluations_used: used,
            trace: merge_traces([self.tally.trace()], used),
            wall_time_ms: Some(self.started.elapsed().as_secs_f64() * 1e3),
            events: chain.into_iter().collect(),
            blacklist: None,
            config_echo: ConfigEcho::Baseline(self.cfg.clone()),
        })
    }
}
