//! Run traces and their JSON / CSV forms.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::baselines::BaselineConfig;
use crate::budget::{Phase, TracePoint};
use crate::error::{Error, Result};
use crate::space::Candidate;
use crate::yo::YoConfig;

/// Something that happened to one chain. Iterations are 1-based and counted
/// separately in each phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Event {
    Accept {
        phase: Phase,
        iteration: u64,
    },
    Reject {
        phase: Phase,
        iteration: u64,
    },
    /// The proposal fell in a blacklisted region and was skipped unevaluated.
    BlacklistHit {
        iteration: u64,
    },
    Reheat {
        iteration: u64,
        old_t: f64,
        new_t: f64,
    },
    BlacklistAdd {
        iteration: u64,
    },
}

impl Event {
    /// Whether this event closes a hybrid-phase iteration (and so marks one
    /// cooling step).
    pub fn ends_hybrid_iteration(&self) -> bool {
        matches!(
            self,
            Event::Accept { phase: Phase::Hybrid, .. }
                | Event::Reject { phase: Phase::Hybrid, .. }
                | Event::BlacklistHit { .. }
        )
    }
}

/// Per-chain part of a [`RunRecord`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainLog {
    pub chain: usize,
    pub t0: f64,
    pub final_temperature: f64,
    pub best_value: f64,
    pub evaluations_burn_in: u64,
    pub evaluations_hybrid: u64,
    pub events: Vec<Event>,
}

impl ChainLog {
    pub fn count(&self, pred: impl Fn(&Event) -> bool) -> usize {
        self.events.iter().filter(|e| pred(e)).count()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BlacklistStats {
    pub additions: u64,
    pub hits: u64,
    pub regions: usize,
}

/// The configuration a run was produced with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfigEcho {
    Yo(YoConfig),
    Baseline(BaselineConfig),
}

/// One optimizer run.
///
/// `trace` lists the strict improvements of the best-so-far value keyed by
/// global evaluation index, closed by a point at `evaluations_used`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: String,
    pub problem: String,
    pub seed: u64,
    pub budget: u64,
    pub best_value: f64,
    pub best: Candidate,
    pub evaluations_used: u64,
    pub trace: Vec<TracePoint>,
    /// Absent unless timing was requested; wall time is the one
    /// non-reproducible quantity of a run.
    pub wall_time_ms: Option<f64>,
    pub events: Vec<ChainLog>,
    pub blacklist: Option<BlacklistStats>,
    pub config_echo: ConfigEcho,
}

impl RunRecord {
    pub fn without_timing(mut self) -> Self {
        self.wall_time_ms = None;
        self
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Writes the trace as `eval,best` rows.
    pub fn write_trace_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["eval", "best"]).map_err(|e| Error::Io(e.to_string()))?;
        for (i, v) in &self.trace {
            w.write_record([i.to_string(), v.to_string()]).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Best-so-far value after `evals` evaluations (`+inf` before the first).
    pub fn best_at(&self, evals: u64) -> f64 {
        self.trace.iter().take_while(|(i, _)| *i <= evals).last().map_or(f64::INFINITY, |(_, v)| *v)
    }
}

/// Merges per-owner improvement traces into one global best-so-far trace and
/// closes it at `evaluations_used`.
pub fn merge_traces<'a>(parts: impl IntoIterator<Item = &'a [TracePoint]>, evaluations_used: u64) -> Vec<TracePoint> {
    let mut points: Vec<TracePoint> = parts.into_iter().flatten().copied().collect();
    points.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut merged: Vec<TracePoint> = Vec::new();
    for (i, v) in points {
        if merged.last().is_none_or(|&(_, best)| v < best) {
            merged.push((i, v));
        }
    }
    if let Some(&(last, best)) = merged.last() {
        if last < evaluations_used {
            merged.push((evaluations_used, best));
        }
    }
    merged
}
