//! Running experiments and writing their results.
//!
//! Every `(optimizer, seed)` pair is one independent job. Jobs may run
//! concurrently; results are collected in optimizer-then-seed order, so the
//! emitted files do not depend on scheduling.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rayon::prelude::*;
use serde::Serialize;
use yo_core::stats::{cohens_d, mann_whitney_u, summarize, welch_t_test};
use yo_core::{run_baseline, RunRecord};

use crate::error::{Error, Result};
use crate::external::{read_external, ExternalRow};
use crate::problem::Problem;
use crate::spec::{ExperimentSpec, RunConfig};

/// Execution settings that do not change any result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// Number of jobs run concurrently; 1 runs them in order on the
    /// calling thread.
    pub parallel: usize,
    /// Keep wall-clock times in the records and the summary. Off by default
    /// because timings are the one output that differs between reruns.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { parallel: 1, timing: false }
    }
}

/// Which variant the tests in the result table compare against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reference {
    /// The first optimizer listed; rows keep spec order.
    First,
    /// The variant with the lowest mean; rows are ranked by mean.
    BestMean,
}

/// One optimizer run of an experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub variant: String,
    pub seed: u64,
    pub record: RunRecord,
}

/// One row of the result table: summary statistics of a variant's final
/// values plus a Welch test and Cohen's d against the reference variant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub variant: String,
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub cv: Option<f64>,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub runtime_mean_ms: Option<f64>,
    /// Two-sided Welch p-value against the reference; absent for the
    /// reference itself and when either sample has fewer than two values.
    pub p_value_vs_baseline: Option<f64>,
    /// `(mean_reference − mean_variant) / s_pooled`.
    pub cohens_d_vs_baseline: Option<f64>,
}

/// Tests of one variant against the reference.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairwiseRow {
    pub variant: String,
    pub reference: String,
    pub welch_t: Option<f64>,
    pub welch_dof: Option<f64>,
    pub welch_p: Option<f64>,
    /// One-sided Welch p-value for `mean_reference < mean_variant`.
    pub welch_p_reference_lower: Option<f64>,
    pub mann_whitney_u: Option<f64>,
    /// One-sided Mann–Whitney p-value for the reference tending lower.
    pub mann_whitney_p_reference_lower: Option<f64>,
    pub cohens_d: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    pub reference: String,
    pub rows: Vec<SummaryRow>,
    pub pairwise: Vec<PairwiseRow>,
}

impl ResultTable {
    /// Builds the table from each variant's final values, in the order
    /// given. `runtimes` are per-run milliseconds when timing was kept.
    pub fn build(samples: &[Sample], reference: Reference) -> Result<Self> {
        let mut order: Vec<&Sample> = samples.iter().collect();
        let mut rows = Vec::with_capacity(samples.len());
        let mut summaries = Vec::with_capacity(samples.len());
        for s in &order {
            summaries.push(summarize(&s.values)?);
        }
        if reference == Reference::BestMean {
            let mut idx: Vec<usize> = (0..order.len()).collect();
            idx.sort_by(|&a, &b| summaries[a].mean.total_cmp(&summaries[b].mean));
            order = idx.iter().map(|&i| order[i]).collect();
            summaries = idx.iter().map(|&i| summaries[i].clone()).collect();
        }
        let reference = order.first().ok_or_else(|| Error::Spec("no variant produced results".into()))?;
        let mut pairwise = Vec::new();
        for (s, summary) in order.iter().zip(&summaries) {
            let is_reference = s.variant == reference.variant;
            let testable = !is_reference && s.values.len() >= 2 && reference.values.len() >= 2;
            let welch = testable.then(|| welch_t_test(&reference.values, &s.values).ok()).flatten();
            let d = testable.then(|| cohens_d(&reference.values, &s.values).ok()).flatten();
            if !is_reference {
                let mw = mann_whitney_u(&reference.values, &s.values).ok();
                pairwise.push(PairwiseRow {
                    variant: s.variant.clone(),
                    reference: reference.variant.clone(),
                    welch_t: welch.map(|w| w.t),
                    welch_dof: welch.map(|w| w.dof),
                    welch_p: welch.map(|w| w.p_value),
                    welch_p_reference_lower: welch.map(|w| w.p_less()),
                    mann_whitney_u: mw.map(|m| m.u),
                    mann_whitney_p_reference_lower: mw.map(|m| m.p_less),
                    cohens_d: d,
                });
            }
            rows.push(SummaryRow {
                variant: s.variant.clone(),
                n: summary.n,
                mean: summary.mean,
                std: summary.std,
                cv: summary.cv,
                min: summary.min,
                median: summary.median,
                max: summary.max,
                runtime_mean_ms: s.runtimes_ms.as_deref().map(yo_core::stats::mean),
                p_value_vs_baseline: welch.map(|w| w.p_value),
                cohens_d_vs_baseline: d,
            });
        }
        Ok(ResultTable { reference: reference.variant.clone(), rows, pairwise })
    }

    pub fn row(&self, variant: &str) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.variant == variant)
    }
}

/// The final values of one variant across seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub variant: String,
    pub seeds: Vec<u64>,
    pub values: Vec<f64>,
    pub runtimes_ms: Option<Vec<f64>>,
}

/// Everything an experiment produced.
#[derive(Clone, Debug)]
pub struct Report {
    pub spec: ExperimentSpec,
    /// `<output_dir>/<name>`.
    pub dir: PathBuf,
    pub runs: Vec<RunOutcome>,
    pub external: Vec<ExternalRow>,
    pub samples: Vec<Sample>,
    pub table: ResultTable,
}

impl Report {
    /// The final values of `variant` in seed order.
    pub fn values(&self, variant: &str) -> Option<&[f64]> {
        self.samples.iter().find(|s| s.variant == variant).map(|s| s.values.as_slice())
    }
}

/// Runs all variants of an ablation study on the composite function.
pub fn run_ablation(spec: &ExperimentSpec, opts: RunOptions) -> Result<Report> {
    if spec.problem != Problem::Composite5d {
        return Err(Error::Spec(format!("the ablation study runs on composite5d, not {}", spec.problem)));
    }
    run_experiment(spec, opts, Reference::First)
}

/// Runs every optimizer on the TSP instance of each seed and additionally
/// writes the instances, best tours and a per-seed table.
pub fn run_tsp_suite(spec: &ExperimentSpec, opts: RunOptions) -> Result<Report> {
    if !spec.problem.is_tsp() {
        return Err(Error::Spec(format!("the TSP suite needs a tspN problem, not {}", spec.problem)));
    }
    run_experiment(spec, opts, Reference::First)
}

/// Runs the continuous comparison, ranks all methods (including external
/// results) by mean and tests each against the best-ranked one.
pub fn run_continuous_comparison(spec: &ExperimentSpec, opts: RunOptions) -> Result<Report> {
    if spec.problem.is_tsp() {
        return Err(Error::Spec(format!("the continuous comparison needs a continuous problem, not {}", spec.problem)));
    }
    run_experiment(spec, opts, Reference::BestMean)
}

/// Runs `spec`, writes all outputs under `<output_dir>/<name>` and returns
/// the report.
pub fn run_experiment(spec: &ExperimentSpec, opts: RunOptions, reference: Reference) -> Result<Report> {
    spec.validate()?;
    let mut external = Vec::new();
    for path in &spec.external {
        external.extend(read_external(path)?);
    }
    for row in &external {
        if spec.optimizers.iter().any(|o| o.name == row.algorithm) {
            return Err(Error::Spec(format!("external algorithm `{}` clashes with an optimizer name", row.algorithm)));
        }
    }
    let runs = execute(spec, opts)?;
    let samples = collect_samples(spec, &runs, &external, opts.timing);
    let table = ResultTable::build(&samples, reference)?;
    let report = Report { spec: spec.clone(), dir: spec.output_dir.join(&spec.name), runs, external, samples, table };
    write_report(&report)?;
    Ok(report)
}

/// Runs one optimizer configuration on `problem`.
pub fn run_single(problem: Problem, config: &RunConfig, delay: Duration) -> Result<RunRecord> {
    let seed = match config {
        RunConfig::Yo(c) => c.seed,
        RunConfig::Baseline(c) => c.seed,
    };
    let objective = problem.objective(seed, delay)?;
    Ok(match config {
        RunConfig::Yo(c) => yo_core::run(&objective, c)?,
        RunConfig::Baseline(c) => run_baseline(&objective, c)?,
    })
}

fn execute(spec: &ExperimentSpec, opts: RunOptions) -> Result<Vec<RunOutcome>> {
    let jobs: Vec<(usize, u64)> =
        (0..spec.optimizers.len()).flat_map(|i| spec.seeds.iter().map(move |&s| (i, s))).collect();
    let delay = Duration::from_secs_f64(spec.delay);
    let run_job = |&(i, seed): &(usize, u64)| -> Result<RunOutcome> {
        let opt = &spec.optimizers[i];
        let record = run_single(spec.problem, &opt.config(spec.budget, seed)?, delay)?;
        let record = if opts.timing { record } else { record.without_timing() };
        Ok(RunOutcome { variant: opt.name.clone(), seed, record })
    };
    if opts.parallel <= 1 {
        jobs.iter().map(run_job).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.parallel)
            .build()
            .map_err(|e| Error::Spec(format!("cannot start {} worker threads: {e}", opts.parallel)))?;
        pool.install(|| jobs.par_iter().map(run_job).collect())
    }
}

fn collect_samples(spec: &ExperimentSpec, runs: &[RunOutcome], external: &[ExternalRow], timing: bool) -> Vec<Sample> {
    let mut samples: Vec<Sample> = spec
        .optimizers
        .iter()
        .map(|o| {
            let mine: Vec<&RunOutcome> = runs.iter().filter(|r| r.variant == o.name).collect();
            Sample {
                variant: o.name.clone(),
                seeds: mine.iter().map(|r| r.seed).collect(),
                values: mine.iter().map(|r| r.record.best_value).collect(),
                runtimes_ms: timing.then(|| mine.iter().filter_map(|r| r.record.wall_time_ms).collect()),
            }
        })
        .collect();
    let mut by_algorithm: BTreeMap<&str, Vec<&ExternalRow>> = BTreeMap::new();
    for row in external {
        by_algorithm.entry(&row.algorithm).or_default().push(row);
    }
    for (algorithm, mut rows) in by_algorithm {
        rows.sort_by_key(|r| r.seed);
        samples.push(Sample {
            variant: algorithm.to_string(),
            seeds: rows.iter().map(|r| r.seed).collect(),
            values: rows.iter().map(|r| r.final_best).collect(),
            runtimes_ms: None,
        });
    }
    samples
}

#[derive(Serialize)]
struct RawRow<'a> {
    variant: &'a str,
    seed: u64,
    final_best: f64,
    evaluations_used: Option<u64>,
    runtime_ms: Option<f64>,
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(Error::io(path))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(Error::io(path))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(Error::io(path))?;
    Ok(csv::Writer::from_writer(file))
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv_writer(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(Error::io(path))
}

/// Writes the experiment outputs:
///
/// - `experiment.toml`: the resolved spec;
/// - `<variant>/seed<k>.json` and `<variant>/seed<k>_trace.csv` per run;
/// - `raw.csv`: one final value per run (box-plot data);
/// - `summary.csv`: the result table;
/// - `pairwise.csv`: tests of each variant against the reference;
/// - for tours, `instances/seed<k>.csv`, `<variant>/seed<k>_tour.csv` and
///   `per_seed.csv` (one row per seed, one column per variant).
fn write_report(report: &Report) -> Result<()> {
    let dir = &report.dir;
    create_dir(dir)?;
    write_file(&dir.join("experiment.toml"), report.spec.to_toml()?)?;

    for run in &report.runs {
        let vdir = dir.join(&run.variant);
        create_dir(&vdir)?;
        write_file(&vdir.join(format!("seed{}.json", run.seed)), run.record.to_json()? + "\n")?;
        let trace = vdir.join(format!("seed{}_trace.csv", run.seed));
        let file = fs::File::create(&trace).map_err(Error::io(&trace))?;
        run.record.write_trace_csv(file)?;
        if let Some(tour) = run.record.best.position.as_tour() {
            let mut w = csv_writer(&vdir.join(format!("seed{}_tour.csv", run.seed)))?;
            w.write_record(["position", "city"])?;
            for (i, city) in tour.iter().enumerate() {
                w.write_record([i.to_string(), city.to_string()])?;
            }
            w.flush().map_err(Error::io(&vdir))?;
        }
    }

    let mut raw: Vec<RawRow> = report
        .runs
        .iter()
        .map(|r| RawRow {
            variant: &r.variant,
            seed: r.seed,
            final_best: r.record.best_value,
            evaluations_used: Some(r.record.evaluations_used),
            runtime_ms: r.record.wall_time_ms,
        })
        .collect();
    for s in report.samples.iter().filter(|s| !report.spec.optimizers.iter().any(|o| o.name == s.variant)) {
        for (&seed, &v) in s.seeds.iter().zip(&s.values) {
            raw.push(RawRow { variant: &s.variant, seed, final_best: v, evaluations_used: None, runtime_ms: None });
        }
    }
    write_rows(&dir.join("raw.csv"), &raw)?;
    write_rows(&dir.join("summary.csv"), &report.table.rows)?;
    write_rows(&dir.join("pairwise.csv"), &report.table.pairwise)?;

    if report.spec.problem.is_tsp() {
        let idir = dir.join("instances");
        create_dir(&idir)?;
        for &seed in &report.spec.seeds {
            let inst = report.spec.problem.instance(seed)?.expect("tsp instance");
            let path = idir.join(format!("seed{seed}.csv"));
            inst.write_csv(fs::File::create(&path).map_err(Error::io(&path))?)?;
        }
        let mut w = csv_writer(&dir.join("per_seed.csv"))?;
        let mut header = vec!["seed".to_string()];
        header.extend(report.spec.optimizers.iter().map(|o| o.name.clone()));
        w.write_record(&header)?;
        for &seed in &report.spec.seeds {
            let mut row = vec![seed.to_string()];
            for o in &report.spec.optimizers {
                let v = report.runs.iter().find(|r| r.variant == o.name && r.seed == seed).map(|r| r.record.best_value);
                row.push(v.map_or_else(String::new, |v| v.to_string()));
            }
            w.write_record(&row)?;
        }
        w.flush().map_err(Error::io(dir))?;
    }
    Ok(())
}
