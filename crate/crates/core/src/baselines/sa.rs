use super::{BaselineConfig, Session};
use crate::error::Result;
use crate::objective::Objective;
use crate::record::{ChainLog, RunRecord};
use crate::space::mcmc_propose;
use crate::yo::metropolis_accept;

/// Classical single-chain simulated annealing with geometric cooling and no
/// reheating.
///
/// The start point is the best of `pilot` uniform draws, and unless `t0` is
/// given the start temperature is their value spread (floored at 1).
pub fn run_sa(objective: &dyn Objective, cfg: &BaselineConfig) -> Result<RunRecord> {
    let mut s = Session::new(objective, cfg)?;
    let mut pilots = Vec::new();
    for _ in 0..cfg.pilot {
        let p = s.space().sample(&mut s.rng);
        match s.evaluate(p) {
            Some(c) => pilots.push(c),
            None => break,
        }
    }
    let lo = pilots.iter().map(|c| c.value_or_inf()).fold(f64::INFINITY, f64::min);
    let hi = pilots.iter().map(|c| c.value_or_inf()).fold(f64::NEG_INFINITY, f64::max);
    let t0 = cfg.t0.unwrap_or(if (hi - lo).is_finite() { (hi - lo).max(1.0) } else { 1.0 });
    let Some(mut current) = s.best.clone() else {
        return s.finish(None);
    };

    let mut t = t0;
    while s.remaining() > 0 {
        let x = mcmc_propose(&current, s.space(), &cfg.proposal, &mut s.rng)?;
        let Some(x) = s.evaluate(x.position) else { break };
        if metropolis_accept(x.value_or_inf(), current.value_or_inf(), t, &mut s.rng)? {
            current = x;
        }
        t *= cfg.beta;
    }

    let best_value = s.best.as_ref().map_or(f64::INFINITY, |b| b.value_or_inf());
    let log = ChainLog {
        chain: 0,
        t0,
        final_temperature: t,
        best_value,
        evaluations_burn_in: 0,
        evaluations_hybrid: cfg.budget - s.remaining(),
        events: Vec::new(),
    };
    s.finish(Some(log))
}
