use super::{BaselineConfig, Session};
use crate::error::Result;
use crate::objective::Objective;
use crate::record::RunRecord;
use crate::refine::{greedy_refine, RefineParams};
use crate::space::Candidate;

/// Random-restart local search: draw a uniform start, descend to a local
/// optimum (first-improvement 2-opt on tours, coordinate descent on boxes),
/// and repeat until the budget is spent.
pub fn run_two_opt_restart(objective: &dyn Objective, cfg: &BaselineConfig) -> Result<RunRecord> {
    let mut s = Session::new(objective, cfg)?;
    let params = RefineParams::new(usize::MAX, cfg.refine_step);
    while s.remaining() > 0 {
        let start = Candidate::new(s.space().sample(&mut s.rng));
        let Some(local) = greedy_refine(start, &mut s.meter(), &params) else { break };
        s.observe(&local);
    }
    s.finish(None)
}
