//! Experiment descriptions.
//!
//! An experiment is a TOML file with a few top-level keys and one
//! `[[optimizer]]` table per variant:
//!
//! ```toml
//! name = "ablation"
//! problem = "composite5d"
//! budget = 150
//! runs_per_variant = 30     # seeds 0..30, or list them: seeds = [42, 101]
//! output_dir = "results"
//! delay = 0.0               # seconds slept per evaluation
//!
//! [[optimizer]]
//! name = "A0"
//! algorithm = "yo"
//!
//! [[optimizer]]
//! name = "A1"
//! algorithm = "yo"
//! disable_mcmc = true
//! ```
//!
//! Every key of an optimizer table other than `name` and `algorithm`
//! overrides a field of that optimizer's default configuration; unknown keys
//! are rejected. `budget` and `seed` belong to the experiment, not to a
//! variant.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use yo_core::{Algorithm, BaselineConfig, YoConfig};

use crate::error::{Error, Result};
use crate::problem::Problem;

/// One variant of an experiment: an optimizer plus configuration overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSpec {
    pub name: String,
    /// `yo` or a baseline name (`sa`, `ga`, `two_opt_restart`,
    /// `random_search`, `apso`).
    pub algorithm: String,
    #[serde(flatten)]
    pub overrides: Map<String, Value>,
}

/// A fully resolved optimizer configuration for one run.
#[derive(Clone, Debug, PartialEq)]
pub enum RunConfig {
    Yo(YoConfig),
    Baseline(BaselineConfig),
}

impl OptimizerSpec {
    pub fn new(name: &str, algorithm: &str) -> Self {
        OptimizerSpec { name: name.into(), algorithm: algorithm.into(), overrides: Map::new() }
    }

    /// Adds overrides given as a JSON object.
    pub fn with(mut self, overrides: Value) -> Self {
        if let Value::Object(map) = overrides {
            self.overrides.extend(map);
        }
        self
    }

    /// The configuration for one run at `budget` with `seed`.
    pub fn config(&self, budget: u64, seed: u64) -> Result<RunConfig> {
        for key in ["budget", "seed"] {
            if self.overrides.contains_key(key) {
                return Err(Error::Spec(format!(
                    "optimizer `{}`: `{key}` is set for the whole experiment, not per optimizer",
                    self.name
                )));
            }
        }
        let cfg = if self.algorithm == "yo" {
            let base = YoConfig { budget, seed, ..YoConfig::default() };
            let cfg: YoConfig = merge(&base, &self.overrides, &self.name)?;
            cfg.validate()?;
            RunConfig::Yo(cfg)
        } else {
            let algorithm: Algorithm = self.algorithm.parse()?;
            let cfg: BaselineConfig =
                merge(&BaselineConfig::new(algorithm, budget, seed), &self.overrides, &self.name)?;
            cfg.validate()?;
            RunConfig::Baseline(cfg)
        };
        Ok(cfg)
    }
}

/// Applies `overrides` on top of the serialized `base`, recursing into nested
/// tables, and rejects keys `base` does not have.
fn merge<T: Serialize + DeserializeOwned>(base: &T, overrides: &Map<String, Value>, variant: &str) -> Result<T> {
    fn apply(target: &mut Map<String, Value>, overrides: &Map<String, Value>, path: &str, variant: &str) -> Result<()> {
        for (key, value) in overrides {
            let full = if path.is_empty() { key.clone() } else { format!("{path}.{key}") };
            match (target.get_mut(key), value) {
                (None, _) => {
                    return Err(Error::Spec(format!("optimizer `{variant}`: unknown configuration key `{full}`")));
                }
                (Some(Value::Object(inner)), Value::Object(sub)) => apply(inner, sub, &full, variant)?,
                (Some(slot), _) => *slot = value.clone(),
            }
        }
        Ok(())
    }
    let mut value = serde_json::to_value(base)?;
    let Value::Object(target) = &mut value else {
        unreachable!("configurations serialize to objects");
    };
    apply(target, overrides, "", variant)?;
    serde_json::from_value(value).map_err(|e| Error::Spec(format!("optimizer `{variant}`: {e}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    name: String,
    problem: Problem,
    budget: Option<u64>,
    seeds: Option<Vec<u64>>,
    runs_per_variant: Option<usize>,
    output_dir: Option<PathBuf>,
    #[serde(default)]
    delay: f64,
    #[serde(default)]
    external: Vec<PathBuf>,
    #[serde(rename = "optimizer", default)]
    optimizers: Vec<OptimizerSpec>,
}

/// A complete experiment: every optimizer is run once per seed on the same
/// problem with the same budget.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub problem: Problem,
    pub budget: u64,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    /// Seconds slept after every evaluation.
    pub delay: f64,
    /// Results of optimizers run elsewhere, as `algorithm,seed,final_best`
    /// CSV files.
    pub external: Vec<PathBuf>,
    #[serde(rename = "optimizer")]
    pub optimizers: Vec<OptimizerSpec>,
}

impl ExperimentSpec {
    /// Parses a TOML experiment description. `seeds` and `runs_per_variant`
    /// may both be given only if they agree; `runs_per_variant` alone means
    /// seeds `0..runs_per_variant`. Relative external paths are resolved
    /// against `base_dir`.
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: SpecFile = toml::from_str(text).map_err(|e| Error::Spec(e.to_string()))?;
        let seeds = match (raw.seeds, raw.runs_per_variant) {
            (Some(seeds), Some(runs)) if seeds.len() != runs => {
                return Err(Error::Spec(format!("{} seeds listed but runs_per_variant = {runs}", seeds.len())));
            }
            (Some(seeds), _) => seeds,
            (None, Some(runs)) => (0..runs as u64).collect(),
            (None, None) => return Err(Error::Spec("give `seeds` or `runs_per_variant`".into())),
        };
        let spec = ExperimentSpec {
            name: raw.name,
            problem: raw.problem,
            budget: raw.budget.unwrap_or(raw.problem.default_budget()),
            seeds,
            output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("results")),
            delay: raw.delay,
            external: raw.external.into_iter().map(|p| base_dir.join(p)).collect(),
            optimizers: raw.optimizers,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
            .map_err(|e| Error::Spec(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Spec(e.to_string()))
    }

    /// Checks the invariants and that every optimizer configuration resolves.
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::Spec(format!("experiment name `{}` is not a valid directory name", self.name)));
        }
        if self.optimizers.is_empty() {
            return Err(Error::Spec("at least one optimizer is required".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Spec("at least one seed is required".into()));
        }
        if self.budget == 0 {
            return Err(Error::Spec("budget must be positive".into()));
        }
        if !(self.delay >= 0.0 && self.delay.is_finite()) {
            return Err(Error::Spec(format!("delay must be a non-negative number of seconds, got {}", self.delay)));
        }
        let mut seen = std::collections::HashSet::new();
        for seed in &self.seeds {
            if !seen.insert(seed) {
                return Err(Error::Spec(format!("seed {seed} is listed twice")));
            }
        }
        let mut names = std::collections::HashSet::new();
        for opt in &self.optimizers {
            if opt.name.is_empty() || opt.name.contains(['/', '\\', ',']) {
                return Err(Error::Spec(format!("optimizer name `{}` is not usable as a directory name", opt.name)));
            }
            if !names.insert(&opt.name) {
                return Err(Error::Spec(format!("optimizer name `{}` is used twice", opt.name)));
            }
            opt.config(self.budget, self.seeds[0])?;
        }
        Ok(())
    }

    /// Six hybrid-optimizer variants on the composite function: the full
    /// method (A0), without burn-in (A1), without greedy refinement (A2),
    /// without annealing (A3), without the blacklist (A4) and with a single
    /// chain (A5).
    pub fn ablation(budget: u64, runs: usize) -> Self {
        ExperimentSpec {
            name: "ablation".into(),
            problem: Problem::Composite5d,
            budget,
            seeds: (0..runs as u64).collect(),
            output_dir: PathBuf::from("results"),
            delay: 0.0,
            external: Vec::new(),
            optimizers: vec![
                OptimizerSpec::new("A0", "yo"),
                OptimizerSpec::new("A1", "yo").with(json!({ "disable_mcmc": true })),
                OptimizerSpec::new("A2", "yo").with(json!({ "disable_greedy": true })),
                OptimizerSpec::new("A3", "yo").with(json!({ "disable_sa": true })),
                OptimizerSpec::new("A4", "yo").with(json!({ "blacklist_enabled": false })),
                OptimizerSpec::new("A5", "yo").with(json!({ "chains": 1, "top_k": 1 })),
            ],
        }
    }

    /// The hybrid optimizer against annealing, the genetic algorithm, 2-opt
    /// restarts and random search on `n`-city instances.
    pub fn tsp(n: usize, seeds: Vec<u64>, budget: Option<u64>) -> Self {
        let problem = Problem::Tsp(n);
        ExperimentSpec {
            name: problem.to_string(),
            problem,
            budget: budget.unwrap_or(problem.default_budget()),
            seeds,
            output_dir: PathBuf::from("results"),
            delay: 0.0,
            external: Vec::new(),
            optimizers: ["yo", "sa", "ga", "two_opt_restart", "random_search"]
                .into_iter()
                .map(|a| OptimizerSpec::new(a, a))
                .collect(),
        }
    }

    /// The hybrid optimizer against the particle swarm and random search on
    /// the Rosenbrock function.
    pub fn continuous(budget: u64, runs: usize) -> Self {
        ExperimentSpec {
            name: "continuous".into(),
            problem: Problem::Rosenbrock5d,
            budget,
            seeds: (0..runs as u64).collect(),
            output_dir: PathBuf::from("results"),
            delay: 0.0,
            external: Vec::new(),
            optimizers: ["yo", "apso", "random_search"].into_iter().map(|a| OptimizerSpec::new(a, a)).collect(),
        }
    }
}
