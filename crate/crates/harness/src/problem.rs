use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use yo_core::space::{Position, SearchSpace};
use yo_core::{generate_tsp, FunctionObjective, Objective, TspInstance, TspObjective};

use crate::error::{Error, Result};

/// The benchmark an experiment runs on.
///
/// Written as `composite5d`, `rosenbrock5d`, or `tspN` / `tsp(N)` for a
/// random Euclidean instance of `N` cities. TSP instances are generated from
/// `(N, seed)`, so every optimizer run with the same seed sees the same
/// instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Problem {
    Composite5d,
    Rosenbrock5d,
    Tsp(usize),
}

impl Problem {
    pub fn is_tsp(self) -> bool {
        matches!(self, Problem::Tsp(_))
    }

    /// Evaluation budget used when none is given: 150 for the continuous
    /// functions; 20 000, 50 000 and 100 000 for tours of up to 50, 100 and
    /// more cities.
    pub fn default_budget(self) -> u64 {
        match self {
            Problem::Composite5d | Problem::Rosenbrock5d => 150,
            Problem::Tsp(n) if n <= 50 => 20_000,
            Problem::Tsp(n) if n <= 100 => 50_000,
            Problem::Tsp(_) => 100_000,
        }
    }

    /// The TSP instance for `seed`, or `None` for continuous problems.
    pub fn instance(self, seed: u64) -> Result<Option<TspInstance>> {
        match self {
            Problem::Tsp(n) => Ok(Some(generate_tsp(n, seed)?)),
            _ => Ok(None),
        }
    }

    /// The objective for the run with `seed`, sleeping `delay` per evaluation.
    pub fn objective(self, seed: u64, delay: Duration) -> Result<Delayed<Box<dyn Objective>>> {
        let inner: Box<dyn Objective> = match self {
            Problem::Composite5d => Box::new(FunctionObjective::composite5d()),
            Problem::Rosenbrock5d => Box::new(FunctionObjective::rosenbrock5d()),
            Problem::Tsp(_) => Box::new(TspObjective::new(self.instance(seed)?.expect("tsp instance"))),
        };
        Ok(Delayed { inner, delay })
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Problem::Composite5d => f.write_str("composite5d"),
            Problem::Rosenbrock5d => f.write_str("rosenbrock5d"),
            Problem::Tsp(n) => write!(f, "tsp{n}"),
        }
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "composite5d" => return Ok(Problem::Composite5d),
            "rosenbrock5d" => return Ok(Problem::Rosenbrock5d),
            _ => {}
        }
        let n = s
            .strip_prefix("tsp")
            .map(|rest| rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(rest))
            .and_then(|n| n.parse::<usize>().ok())
            .ok_or_else(|| {
                Error::Spec(format!("unknown problem `{s}` (expected composite5d, rosenbrock5d or tspN)"))
            })?;
        if n < 3 {
            return Err(Error::Spec(format!("a tour needs at least 3 cities, got {n}")));
        }
        Ok(Problem::Tsp(n))
    }
}

impl TryFrom<String> for Problem {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Problem> for String {
    fn from(p: Problem) -> String {
        p.to_string()
    }
}

/// Sleeps for a fixed time after every evaluation to emulate an expensive
/// objective.
pub struct Delayed<O> {
    pub inner: O,
    pub delay: Duration,
}

impl<O: Objective> Objective for Delayed<O> {
    fn space(&self) -> &SearchSpace {
        self.inner.space()
    }

    fn evaluate(&self, position: &Position) -> f64 {
        let v = self.inner.evaluate(position);
        if !self.delay.is_zero() {
            std::thread::sleep(self.delay);
        }
        v
    }

    fn name(&self) -> &str {
        self.inner.name()
    }
}
