//! The hybrid optimizer.
//!
//! A run has two phases over `C` independent chains:
//!
//! 1. **Burn-in.** Each chain starts at a uniform random point and performs a
//!    Metropolis random walk at the fixed temperature `T0`, spending
//!    `floor(alpha * B)` evaluations in total.
//! 2. **Hybrid.** Chains restart from the `top_k` best burn-in points. Every
//!    iteration proposes a move, skips it unevaluated if it lands in a
//!    blacklisted region, refines it greedily, and accepts or rejects the
//!    refined point with the annealing rule. The temperature cools by `beta`
//!    each iteration and is multiplied by `gamma` after more than
//!    `theta_reheat` consecutive rejections. Refined points worse than the
//!    running `blacklist_quantile` of observed values are blacklisted.
//!
//! The best point seen by any chain is returned. Each chain draws from its
//! own random stream derived from `(seed, chain index)` and has its own share
//! of the budget, so sequential and parallel execution make the same
//! per-chain decisions when the blacklist is off.

use std::sync::RwLock;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blacklist::{Blacklist, ValueHistory, DEFAULT_MAX_REGIONS, DEFAULT_RADIUS};
use crate::budget::{split_allocation, BudgetLedger, Evaluate, Meter, Phase, Tally};
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::record::{merge_traces, BlacklistStats, ChainLog, ConfigEcho, Event, RunRecord};
use crate::refine::{greedy_refine, two_opt_moves, RefineParams};
use crate::rng::RngStream;
use crate::space::{mcmc_propose, Candidate, ProposalParams, SearchSpace};

/// Default tour move mix for the hybrid optimizer: mostly swaps and
/// insertions. Every proposal is followed by 2-opt refinement, which would
/// simply undo a segment reversal, so reversal kicks are mostly wasted.
pub const KICK_MOVE_MIX: [f64; 3] = [0.2, 0.4, 0.4];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct YoConfig {
    /// Hard cap `B` on objective evaluations.
    pub budget: u64,
    /// Fraction `alpha` of the budget spent in burn-in.
    pub burn_in_fraction: f64,
    pub chains: usize,
    /// Initial temperature. `None` uses the spread (max - min) of the
    /// chains' initial values, floored at 1.
    pub t0: Option<f64>,
    /// Cooling factor applied every hybrid iteration.
    pub beta: f64,
    /// Reheat factor.
    pub gamma: f64,
    /// Reheat once the consecutive-rejection count exceeds this.
    pub theta_reheat: u32,
    pub blacklist_enabled: bool,
    /// Hyperball radius in normalized (unit-box) coordinates.
    pub blacklist_radius: f64,
    /// Points above this empirical quantile of all observed values are poor.
    pub blacklist_quantile: f64,
    /// Observed values needed before anything is blacklisted.
    pub blacklist_warmup: usize,
    pub blacklist_capacity: usize,
    /// Chains whose burn-in bests seed the hybrid phase.
    pub top_k: usize,
    pub disable_mcmc: bool,
    pub disable_greedy: bool,
    pub disable_sa: bool,
    pub seed: u64,
    pub proposal: ProposalParams,
    /// Probes per refinement call. `None` means `2D` for boxes and no cap
    /// (descent to a 2-opt local optimum) for tours.
    pub refine_max_probes: Option<usize>,
    /// Coordinate-descent step as a fraction of each dimension's range.
    pub refine_step: f64,
    /// Run chains on the rayon pool instead of round-robin on one thread.
    pub parallel: bool,
}

impl Default for YoConfig {
    fn default() -> Self {
        YoConfig {
            budget: 150,
            burn_in_fraction: 0.3,
            chains: 4,
            t0: None,
            beta: 0.95,
            gamma: 3.0,
            theta_reheat: 20,
            blacklist_enabled: true,
            blacklist_radius: DEFAULT_RADIUS,
            blacklist_quantile: 0.9,
            blacklist_warmup: 20,
            blacklist_capacity: DEFAULT_MAX_REGIONS,
            top_k: 2,
            disable_mcmc: false,
            disable_greedy: false,
            disable_sa: false,
            seed: 0,
            proposal: ProposalParams { move_mix: KICK_MOVE_MIX, ..ProposalParams::default() },
            refine_max_probes: None,
            refine_step: 0.2,
            parallel: false,
        }
    }
}

impl YoConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.budget == 0 {
            return fail("budget must be positive".into());
        }
        if !(self.burn_in_fraction > 0.0 && self.burn_in_fraction < 1.0) {
            return fail(format!("burn_in_fraction must lie in (0, 1), got {}", self.burn_in_fraction));
        }
        if self.chains == 0 {
            return fail("at least one chain is required".into());
        }
        if self.top_k == 0 || self.top_k > self.chains {
            return fail(format!("top_k must lie in 1..={}, got {}", self.chains, self.top_k));
        }
        if self.budget < self.chains as u64 {
            return fail(format!("budget {} cannot give each of {} chains an evaluation", self.budget, self.chains));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return fail(format!("beta must lie in (0, 1), got {}", self.beta));
        }
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return fail(format!("gamma must exceed 1, got {}", self.gamma));
        }
        if self.theta_reheat == 0 {
            return fail("theta_reheat must be positive".into());
        }
        if let Some(t0) = self.t0 {
            if !(t0 > 0.0 && t0.is_finite()) {
                return fail(format!("t0 must be positive, got {t0}"));
            }
        }
        if !(self.blacklist_radius > 0.0) {
            return fail("blacklist_radius must be positive".into());
        }
        if !(self.blacklist_quantile > 0.0 && self.blacklist_quantile < 1.0) {
            return fail(format!("blacklist_quantile must lie in (0, 1), got {}", self.blacklist_quantile));
        }
        if self.blacklist_capacity == 0 {
            return fail("blacklist_capacity must be positive".into());
        }
        if self.refine_max_probes == Some(0) {
            return fail("refine_max_probes must be positive".into());
        }
        if !(self.refine_step > 0.0) {
            return fail("refine_step must be positive".into());
        }
        self.proposal.validate()
    }

    /// Probes per refinement call on `space`.
    pub fn probes_for(&self, space: &SearchSpace) -> usize {
        self.refine_max_probes.unwrap_or(match space {
            SearchSpace::Continuous { .. } => 2 * space.dim(),
            SearchSpace::Permutation { .. } => usize::MAX,
        })
    }
}

/// Metropolis rule: always accept a non-worse value, otherwise accept with
/// probability `exp(-(f_new - f_cur) / t)`.
pub fn metropolis_accept<R: Rng + ?Sized>(f_new: f64, f_cur: f64, t: f64, rng: &mut R) -> Result<bool> {
    if !(t > 0.0) {
        return Err(Error::Contract(format!("temperature must be positive, got {t}")));
    }
    if f_new <= f_cur {
        return Ok(true);
    }
    Ok(rng.random::<f64>() < (-(f_new - f_cur) / t).exp())
}

/// Annealing acceptance. With `disable_sa` only strict improvements pass.
pub fn sa_accept<R: Rng + ?Sized>(f_new: f64, f_cur: f64, t: f64, disable_sa: bool, rng: &mut R) -> Result<bool> {
    if disable_sa {
        return Ok(f_new < f_cur);
    }
    metropolis_accept(f_new, f_cur, t, rng)
}

/// One chain's state.
#[derive(Clone, Debug)]
pub struct ChainState {
    pub index: usize,
    pub current: Candidate,
    pub best: Candidate,
    pub temperature: f64,
    /// Consecutive annealing rejections.
    pub stagnant: u32,
    pub rng: RngStream,
    pub events: Vec<Event>,
    pub tally: Tally,
    burn_in_iterations: u64,
    hybrid_iterations: u64,
}

impl ChainState {
    /// A chain at an already-evaluated starting point.
    pub fn new(index: usize, start: Candidate, temperature: f64, rng: RngStream, tally: Tally) -> Self {
        ChainState {
            index,
            best: start.clone(),
            current: start,
            temperature,
            stagnant: 0,
            rng,
            events: Vec::new(),
            tally,
            burn_in_iterations: 0,
            hybrid_iterations: 0,
        }
    }

    pub fn hybrid_iterations(&self) -> u64 {
        self.hybrid_iterations
    }

    fn observe(&mut self, x: &Candidate) {
        if x.value_or_inf() < self.best.value_or_inf() {
            self.best = x.clone();
        }
    }
}

/// Shared, read-mostly state of one run.
pub struct RunContext<'a> {
    pub objective: &'a dyn Objective,
    pub ledger: &'a BudgetLedger,
    pub blacklist: &'a RwLock<Blacklist>,
    pub history: &'a ValueHistory,
    pub cfg: &'a YoConfig,
}

impl<'a> RunContext<'a> {
    fn meter<'b>(&'b self, phase: Phase, tally: &'b mut Tally) -> Meter<'b> {
        Meter::new(self.objective, self.ledger, phase, tally).with_history(self.history)
    }

    fn space(&self) -> &SearchSpace {
        self.objective.space()
    }

    fn fresh_or_proposed(&self, chain: &mut ChainState) -> Candidate {
        if self.cfg.disable_mcmc {
            Candidate::new(self.space().sample(&mut chain.rng))
        } else {
            mcmc_propose(&chain.current, self.space(), &self.cfg.proposal, &mut chain.rng)
                .expect("chain state is always a valid candidate")
        }
    }
}

/// Phase 1 for one chain: Metropolis walk at the chain's temperature until
/// its burn-in share is spent. With `disable_mcmc` the walk is replaced by
/// independent uniform draws.
pub fn burn_in(chain: &mut ChainState, ctx: &RunContext<'_>) {
    let t = chain.temperature;
    while chain.tally.left(Phase::BurnIn) > 0 {
        let proposal = ctx.fresh_or_proposed(chain);
        let value = {
            let mut meter = ctx.meter(Phase::BurnIn, &mut chain.tally);
            match meter.evaluate(&proposal.position) {
                Some(v) => v,
                None => break,
            }
        };
        chain.burn_in_iterations += 1;
        let iteration = chain.burn_in_iterations;
        let proposal = Candidate::evaluated(proposal.position, value);
        let accepted = ctx.cfg.disable_mcmc
            || metropolis_accept(value, chain.current.value_or_inf(), t, &mut chain.rng).expect("positive temperature");
        chain.observe(&proposal);
        if accepted {
            chain.current = proposal;
            chain.events.push(Event::Accept { phase: Phase::BurnIn, iteration });
        } else {
            chain.events.push(Event::Reject { phase: Phase::BurnIn, iteration });
        }
    }
}

/// Post-burn-in selection.
///
/// Ranks chains by best value (ties to the lower index) and keeps the first
/// `top_k`. The remaining chains, in index order, restart from copies of the
/// selected bests taken round-robin in rank order. Every chain's current
/// point becomes its assigned best, its temperature `t0` and its
/// stagnation count zero. Returns the selected chain indices in rank order.
pub fn select_best(chains: &mut [ChainState], top_k: usize, t0: f64) -> Result<Vec<usize>> {
    if top_k == 0 || top_k > chains.len() {
        return Err(Error::Config(format!("top_k must lie in 1..={}, got {top_k}", chains.len())));
    }
    let mut ranked: Vec<usize> = (0..chains.len()).collect();
    ranked.sort_by(|&a, &b| chains[a].best.value_or_inf().total_cmp(&chains[b].best.value_or_inf()).then(a.cmp(&b)));
    let selected: Vec<usize> = ranked[..top_k].to_vec();
    let seeds: Vec<Candidate> = selected.iter().map(|&i| chains[i].best.clone()).collect();
    let mut next = 0;
    for chain in chains.iter_mut() {
        if !selected.contains(&chain.index) {
            chain.best = seeds[next % top_k].clone();
            next += 1;
        }
        chain.current = chain.best.clone();
        chain.temperature = t0;
        chain.stagnant = 0;
    }
    Ok(selected)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Continue,
    /// The chain's hybrid share (or the ledger) is exhausted.
    Done,
}

/// One hybrid-phase iteration for `chain`.
pub fn hybrid_step(chain: &mut ChainState, ctx: &RunContext<'_>) -> Step {
    let cfg = ctx.cfg;
    let quota = chain.tally.quota(Phase::Hybrid);
    // Blacklist skips spend nothing; bound them so a saturated blacklist
    // cannot stall the run.
    if chain.tally.left(Phase::Hybrid) == 0
        || ctx.ledger.used_in(Phase::Hybrid) >= ctx.ledger.allocation(Phase::Hybrid)
        || chain.hybrid_iterations >= 10 * quota + 100
    {
        return Step::Done;
    }

    let proposal = ctx.fresh_or_proposed(chain);

    if cfg.blacklist_enabled {
        let blocked = ctx
            .blacklist
            .read()
            .expect("blacklist lock poisoned")
            .contains(&proposal)
            .expect("blacklist matches the search space");
        if blocked {
            chain.hybrid_iterations += 1;
            chain.events.push(Event::BlacklistHit { iteration: chain.hybrid_iterations });
            cool_and_reheat(chain, cfg);
            return Step::Continue;
        }
    }

    let refined = if cfg.disable_greedy {
        let mut meter = ctx.meter(Phase::Hybrid, &mut chain.tally);
        meter.evaluate(&proposal.position).map(|v| Candidate::evaluated(proposal.position, v))
    } else {
        let params = RefineParams::new(cfg.probes_for(ctx.space()), cfg.refine_step)
            .starting_at(refine_start(ctx.space(), &mut chain.rng));
        let mut meter = ctx.meter(Phase::Hybrid, &mut chain.tally);
        greedy_refine(proposal, &mut meter, &params)
    };
    let Some(refined) = refined else {
        return Step::Done;
    };
    chain.hybrid_iterations += 1;
    let iteration = chain.hybrid_iterations;
    let value = refined.value_or_inf();

    let accepted = sa_accept(value, chain.current.value_or_inf(), chain.temperature, cfg.disable_sa, &mut chain.rng)
        .expect("positive temperature");
    chain.observe(&refined);
    if accepted {
        chain.current = refined.clone();
        chain.stagnant = 0;
        chain.events.push(Event::Accept { phase: Phase::Hybrid, iteration });
    } else {
        chain.stagnant += 1;
        chain.events.push(Event::Reject { phase: Phase::Hybrid, iteration });
    }
    cool_and_reheat(chain, cfg);

    if cfg.blacklist_enabled {
        if let Some(threshold) = ctx.history.quantile(cfg.blacklist_quantile, cfg.blacklist_warmup) {
            if value > threshold {
                ctx.blacklist
                    .write()
                    .expect("blacklist lock poisoned")
                    .add_region(&refined, cfg.blacklist_radius)
                    .expect("blacklist matches the search space");
                chain.events.push(Event::BlacklistAdd { iteration });
            }
        }
    }
    Step::Continue
}

fn refine_start(space: &SearchSpace, rng: &mut RngStream) -> usize {
    let span = match space {
        SearchSpace::Continuous { .. } => space.dim(),
        SearchSpace::Permutation { n } => two_opt_moves(*n).len().max(1),
    };
    rng.random_range(0..span)
}

fn cool_and_reheat(chain: &mut ChainState, cfg: &YoConfig) {
    if cfg.disable_sa {
        return;
    }
    chain.temperature *= cfg.beta;
    if chain.stagnant > cfg.theta_reheat {
        let old_t = chain.temperature;
        chain.temperature *= cfg.gamma;
        chain.stagnant = 0;
        chain.events.push(Event::Reheat { iteration: chain.hybrid_iterations, old_t, new_t: chain.temperature });
    }
}

/// Temperature implied by a chain's event log: `t0 * beta^coolings *
/// gamma^reheats`, where each hybrid iteration is one cooling.
pub fn reconstruct_temperature(t0: f64, cfg: &YoConfig, events: &[Event]) -> f64 {
    if cfg.disable_sa {
        return t0;
    }
    let coolings = events.iter().filter(|e| e.ends_hybrid_iteration()).count() as i32;
    let reheats = events.iter().filter(|e| matches!(e, Event::Reheat { .. })).count() as i32;
    t0 * cfg.beta.powi(coolings) * cfg.gamma.powi(reheats)
}

/// Runs the optimizer on `objective`.
pub fn run(objective: &dyn Objective, cfg: &YoConfig) -> Result<RunRecord> {
    cfg.validate()?;
    let started = Instant::now();
    let space = objective.space();
    let ledger = BudgetLedger::new(cfg.budget, cfg.burn_in_fraction)?;
    let blacklist = RwLock::new(Blacklist::new(space, cfg.blacklist_capacity)?);
    let history = ValueHistory::new();
    let ctx = RunContext { objective, ledger: &ledger, blacklist: &blacklist, history: &history, cfg };

    let burn_shares = split_allocation(ledger.allocation(Phase::BurnIn), cfg.chains);
    let hybrid_shares = split_allocation(ledger.allocation(Phase::Hybrid), cfg.chains);
    let mut chains =
        (0..cfg.chains).map(|i| init_chain(i, burn_shares[i], hybrid_shares[i], &ctx)).collect::<Result<Vec<_>>>()?;

    let t0 = cfg.t0.unwrap_or_else(|| initial_spread(&chains));
    for chain in chains.iter_mut() {
        chain.temperature = t0;
    }

    if cfg.parallel {
        chains.par_iter_mut().for_each(|c| burn_in(c, &ctx));
    } else {
        chains.iter_mut().for_each(|c| burn_in(c, &ctx));
    }

    select_best(&mut chains, cfg.top_k, t0)?;

    if cfg.parallel {
        chains.par_iter_mut().for_each(|c| while hybrid_step(c, &ctx) == Step::Continue {});
    } else {
        let mut active = vec![true; chains.len()];
        while active.iter().any(|a| *a) {
            for (chain, live) in chains.iter_mut().zip(active.iter_mut()) {
                if *live && hybrid_step(chain, &ctx) == Step::Done {
                    *live = false;
                }
            }
        }
    }

    let winner = chains
        .iter()
        .min_by(|a, b| a.best.value_or_inf().total_cmp(&b.best.value_or_inf()).then(a.index.cmp(&b.index)))
        .expect("at least one chain");
    let evaluations_used = ledger.used();
    let trace = merge_traces(chains.iter().map(|c| c.tally.trace()), evaluations_used);
    let bl = blacklist.into_inner().expect("blacklist lock poisoned");

    Ok(RunRecord {
        algorithm: "yo".into(),
        problem: objective.name().into(),
        seed: cfg.seed,
        budget: cfg.budget,
        best_value: winner.best.value_or_inf(),
        best: winner.best.clone(),
        evaluations_used,
        trace,
        wall_time_ms: Some(started.elapsed().as_secs_f64() * 1e3),
        events: chains
            .iter()
            .map(|c| ChainLog {
                chain: c.index,
                t0,
                final_temperature: c.temperature,
                best_value: c.best.value_or_inf(),
                evaluations_burn_in: c.tally.spent(Phase::BurnIn),
                evaluations_hybrid: c.tally.spent(Phase::Hybrid),
                events: c.events.clone(),
            })
            .collect(),
        blacklist: cfg.blacklist_enabled.then(|| BlacklistStats {
            additions: bl.additions(),
            hits: bl.hits(),
            regions: bl.len(),
        }),
        config_echo: ConfigEcho::Yo(cfg.clone()),
    })
}

/// Draws and evaluates chain `index`'s starting point. The evaluation is
/// charged to burn-in when the chain has a burn-in share, else to the hybrid
/// phase.
fn init_chain(index: usize, burn_share: u64, hybrid_share: u64, ctx: &RunContext<'_>) -> Result<ChainState> {
    let mut rng = RngStream::for_chain(ctx.cfg.seed, index);
    let mut tally = Tally::new(burn_share, hybrid_share);
    let start = ctx.space().sample(&mut rng);
    let phase = if burn_share > 0 { Phase::BurnIn } else { Phase::Hybrid };
    let value = ctx
        .meter(phase, &mut tally)
        .evaluate(&start)
        .ok_or_else(|| Error::Config(format!("chain {index} has no budget for its starting point")))?;
    Ok(ChainState::new(index, Candidate::evaluated(start, value), 1.0, rng, tally))
}

fn initial_spread(chains: &[ChainState]) -> f64 {
    let values = chains.iter().map(|c| c.current.value_or_inf());
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let spread = hi - lo;
    if spread.is_finite() {
        spread.max(1.0)
    } else {
        1.0
    }
}
