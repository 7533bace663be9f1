use super::{BaselineConfig, Session};
use crate::error::Result;
use crate::objective::Objective;
use crate::record::RunRecord;

/// `budget` independent uniform draws; returns the minimum.
pub fn run_random_search(objective: &dyn Objective, cfg: &BaselineConfig) -> Result<RunRecord> {
    let mut s = Session::new(objective, cfg)?;
    while s.remaining() > 0 {
        let p = s.space().sample(&mut s.rng);
        if s.evaluate(p).is_none() {
            break;
        }
    }
    s.finish(None)
}
