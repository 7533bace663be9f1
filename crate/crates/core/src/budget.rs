//! Evaluation budget accounting.
//!
//! [`BudgetLedger`] is the single authority on how many objective
//! evaluations have been spent. Nothing calls [`Objective::evaluate`] except
//! [`Meter`], and a meter only evaluates after the ledger grants a charge.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::blacklist::ValueHistory;
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::space::{Position, SearchSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    BurnIn,
    Hybrid,
}

impl Phase {
    fn slot(self) -> usize {
        match self {
            Phase::BurnIn => 0,
            Phase::Hybrid => 1,
        }
    }
}

/// Outcome of [`BudgetLedger::charge`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Charge {
    /// Carries the 1-based global index of the granted evaluation.
    Granted(u64),
    Exhausted,
}

/// Hard cap `B` on evaluations, split into a burn-in allocation
/// `floor(alpha * B)` and a hybrid allocation `B - floor(alpha * B)`.
///
/// `charge` is lock-free and atomic: two concurrent callers can never both be
/// granted the last unit of headroom.
#[derive(Debug)]
pub struct BudgetLedger {
    total: u64,
    allocation: [u64; 2],
    used: [AtomicU64; 2],
    sequence: AtomicU64,
}

impl BudgetLedger {
    pub fn new(total: u64, burn_in_fraction: f64) -> Result<Self> {
        if total == 0 {
            return Err(Error::Config("budget must be positive".into()));
        }
        if !(burn_in_fraction > 0.0 && burn_in_fraction < 1.0) {
            return Err(Error::Config(format!("burn-in fraction must lie in (0, 1), got {burn_in_fraction}")));
        }
        let burn_in = (burn_in_fraction * total as f64).floor() as u64;
        Ok(Self::with_allocation(total, burn_in.min(total)))
    }

    /// A ledger with no burn-in allocation; every charge goes to the hybrid
    /// phase. Used by the single-phase baselines.
    pub fn flat(total: u64) -> Result<Self> {
        if total == 0 {
            return Err(Error::Config("budget must be positive".into()));
        }
        Ok(Self::with_allocation(total, 0))
    }

    fn with_allocation(total: u64, burn_in: u64) -> Self {
        BudgetLedger {
            total,
            allocation: [burn_in, total - burn_in],
            used: [AtomicU64::new(0), AtomicU64::new(0)],
            sequence: AtomicU64::new(0),
        }
    }

    /// Grants one evaluation in `phase` if that phase's allocation has
    /// headroom; otherwise reports exhaustion without changing any counter.
    pub fn charge(&self, phase: Phase) -> Charge {
        let slot = phase.slot();
        let cap = self.allocation[slot];
        let granted =
            self.used[slot].fetch_update(Ordering::AcqRel, Ordering::Acquire, |u| (u < cap).then_some(u + 1)).is_ok();
        if granted {
            Charge::Granted(self.sequence.fetch_add(1, Ordering::AcqRel) + 1)
        } else {
            Charge::Exhausted
        }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn allocation(&self, phase: Phase) -> u64 {
        self.allocation[phase.slot()]
    }

    pub fn used_in(&self, phase: Phase) -> u64 {
        self.used[phase.slot()].load(Ordering::Acquire)
    }

    pub fn used(&self) -> u64 {
        self.used_in(Phase::BurnIn) + self.used_in(Phase::Hybrid)
    }

    pub fn remaining(&self) -> u64 {
        self.total - self.used()
    }

    pub fn is_exhausted(&self) -> bool {
        self.used() >= self.total
    }
}

/// Splits `amount` into `parts` shares of `floor(amount / parts)`, the
/// remainder going to the last share.
pub fn split_allocation(amount: u64, parts: usize) -> Vec<u64> {
    assert!(parts > 0, "cannot split among zero parts");
    let base = amount / parts as u64;
    let mut shares = vec![base; parts];
    shares[parts - 1] += amount - base * parts as u64;
    shares
}

/// `(global evaluation index, best value so far)`.
pub type TracePoint = (u64, f64);

/// Anything that can be asked for a budget-charged evaluation.
pub trait Evaluate {
    fn space(&self) -> &SearchSpace;

    /// Charges one evaluation and returns the objective value, or `None`
    /// once the budget is exhausted (in which case nothing was evaluated).
    fn evaluate(&mut self, position: &Position) -> Option<f64>;
}

/// Per-owner bookkeeping behind a [`Meter`]: local per-phase quotas, the
/// best value this owner has observed and the improvements trace.
#[derive(Clone, Debug)]
pub struct Tally {
    quota: [u64; 2],
    spent: [u64; 2],
    best: f64,
    trace: Vec<TracePoint>,
}

impl Tally {
    pub fn new(burn_in_quota: u64, hybrid_quota: u64) -> Self {
        Tally { quota: [burn_in_quota, hybrid_quota], spent: [0, 0], best: f64::INFINITY, trace: Vec::new() }
    }

    /// No local limit; only the ledger caps spending.
    pub fn unlimited() -> Self {
        Self::new(u64::MAX, u64::MAX)
    }

    pub fn quota(&self, phase: Phase) -> u64 {
        self.quota[phase.slot()]
    }

    pub fn spent(&self, phase: Phase) -> u64 {
        self.spent[phase.slot()]
    }

    pub fn left(&self, phase: Phase) -> u64 {
        self.quota(phase).saturating_sub(self.spent(phase))
    }

    pub fn total_spent(&self) -> u64 {
        self.spent[0] + self.spent[1]
    }

    pub fn best(&self) -> f64 {
        self.best
    }

    /// Strict improvements of the best value, in evaluation order.
    pub fn trace(&self) -> &[TracePoint] {
        &self.trace
    }
}

/// The only path from optimizer code to the objective.
pub struct Meter<'a> {
    objective: &'a dyn Objective,
    ledger: &'a BudgetLedger,
    phase: Phase,
    tally: &'a mut Tally,
    history: Option<&'a ValueHistory>,
}

impl<'a> Meter<'a> {
    pub fn new(objective: &'a dyn Objective, ledger: &'a BudgetLedger, phase: Phase, tally: &'a mut Tally) -> Self {
        Meter { objective, ledger, phase, tally, history: None }
    }

    /// Also records every observed value in `history`.
    pub fn with_history(mut self, history: &'a ValueHistory) -> Self {
        self.history = Some(history);
        self
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn tally(&self) -> &Tally {
        self.tally
    }

    /// True when a further charge in this phase cannot succeed.
    pub fn exhausted(&self) -> bool {
        self.tally.left(self.phase) == 0 || self.ledger.used_in(self.phase) >= self.ledger.allocation(self.phase)
    }
}

impl Evaluate for Meter<'_> {
    fn space(&self) -> &SearchSpace {
        self.objective.space()
    }

    fn evaluate(&mut self, position: &Position) -> Option<f64> {
        if self.tally.left(self.phase) == 0 {
            return None;
        }
        let index = match self.ledger.charge(self.phase) {
            Charge::Granted(i) => i,
            Charge::Exhausted => return None,
        };
        self.tally.spent[self.phase.slot()] += 1;
        let value = self.objective.evaluate(position);
        if let Some(h) = self.history {
            h.push(value);
        }
        if value < self.tally.best {
            self.tally.best = value;
            self.tally.trace.push((index, value));
        }
        Some(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{Counted, FunctionObjective};

    #[test]
    fn floor_split_and_phase_caps() {
        let ledger = BudgetLedger::new(150, 0.3).unwrap();
        assert_eq!(ledger.allocation(Phase::BurnIn), 45);
        assert_eq!(ledger.allocation(Phase::Hybrid), 105);
        for _ in 0..45 {
            assert!(matches!(ledger.charge(Phase::BurnIn), Charge::Granted(_)));
        }
        assert_eq!(ledger.charge(Phase::BurnIn), Charge::Exhausted);
        assert_eq!(ledger.used(), 45);
    }

    #[test]
    fn hard_cap() {
        let ledger = BudgetLedger::new(10, 0.5).unwrap();
        for _ in 0..5 {
            ledger.charge(Phase::BurnIn);
            ledger.charge(Phase::Hybrid);
        }
        assert_eq!(ledger.used(), 10);
        assert_eq!(ledger.charge(Phase::BurnIn), Charge::Exhausted);
        assert_eq!(ledger.charge(Phase::Hybrid), Charge::Exhausted);
        assert_eq!(ledger.used(), 10);
    }

    #[test]
    fn grants_are_numbered_consecutively() {
        let ledger = BudgetLedger::flat(3).unwrap();
        let got: Vec<_> = (0..4).map(|_| ledger.charge(Phase::Hybrid)).collect();
        assert_eq!(got, vec![Charge::Granted(1), Charge::Granted(2), Charge::Granted(3), Charge::Exhausted]);
    }

    #[test]
    fn concurrent_charges_never_overdraw() {
        let ledger = BudgetLedger::new(1000, 0.4).unwrap();
        let granted = AtomicU64::new(0);
        std::thread::scope(|s| {
            for _ in 0..8 {
                s.spawn(|| {
                    for _ in 0..400 {
                        for phase in [Phase::BurnIn, Phase::Hybrid] {
                            if let Charge::Granted(_) = ledger.charge(phase) {
                                granted.fetch_add(1, Ordering::SeqCst);
                            }
                        }
                    }
                });
            }
        });
        assert_eq!(granted.load(Ordering::SeqCst), 1000);
        assert_eq!(ledger.used_in(Phase::BurnIn), 400);
        assert_eq!(ledger.used_in(Phase::Hybrid), 600);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(BudgetLedger::new(0, 0.3).is_err());
        assert!(BudgetLedger::new(10, 0.0).is_err());
        assert!(BudgetLedger::new(10, 1.0).is_err());
    }

    #[test]
    fn split_gives_remainder_to_last() {
        assert_eq!(split_allocation(45, 4), vec![11, 11, 11, 12]);
        assert_eq!(split_allocation(3, 4), vec![0, 0, 0, 3]);
        assert_eq!(split_allocation(105, 1), vec![105]);
    }

    #[test]
    fn meter_charges_before_evaluating() {
        let f = Counted::new(FunctionObjective::composite5d());
        let ledger = BudgetLedger::flat(4).unwrap();
        let mut tally = Tally::new(0, 3);
        let mut meter = Meter::new(&f, &ledger, Phase::Hybrid, &mut tally);
        let p = Position::Real(vec![0.0; 5]);
        let evaluated = (0..10).filter_map(|_| meter.evaluate(&p)).count();
        assert_eq!(evaluated, 3);
        assert_eq!(f.calls(), 3);
        assert_eq!(ledger.used(), 3);
        assert_eq!(tally.trace(), &[(1, 5.0)]);
    }
}
