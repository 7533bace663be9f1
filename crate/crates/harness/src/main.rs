use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use yo_bench::{
    run_ablation, run_continuous_comparison, run_single, run_tsp_suite, Error, ExperimentSpec, OptimizerSpec, Problem,
    Report, Result, RunOptions,
};

/// Runs the hybrid optimizer and its baselines on benchmark problems.
#[derive(Parser)]
#[command(name = "yo-bench", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// First seed (experiments use seeds SEED..SEED+RUNS) or the seed of a single run.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Evaluation budget per run.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Runs per variant.
    #[arg(long, global = true)]
    runs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seconds slept after every objective evaluation.
    #[arg(long, global = true, value_name = "SECONDS")]
    delay: Option<f64>,
    /// Number of runs executed concurrently.
    #[arg(long, global = true, value_name = "N", default_value_t = 1)]
    parallel: usize,
    /// Experiment spec file (TOML).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Record wall-clock times (makes outputs differ between reruns).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Ablation study of the hybrid optimizer on the composite function.
    Ablation,
    /// The hybrid optimizer against the baselines on random TSP instances.
    Tsp {
        /// Number of cities.
        #[arg(long)]
        n: Option<usize>,
        /// Comma-separated instance seeds.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
    },
    /// Continuous comparison on Rosenbrock 5D, optionally with external results.
    Continuous {
        /// CSV with header `algorithm,seed,final_best`; may be repeated.
        #[arg(long, value_name = "FILE")]
        external: Vec<PathBuf>,
    },
    /// One optimizer on one problem; prints the run record as JSON.
    Single {
        /// composite5d, rosenbrock5d or tspN.
        #[arg(long)]
        problem: Problem,
        /// yo, sa, ga, two_opt_restart, random_search or apso.
        #[arg(long)]
        algo: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    let opts = RunOptions { parallel: g.parallel.max(1), timing: g.timing };
    let report = match &cli.command {
        Command::Single { problem, algo } => return single(g, *problem, algo),
        Command::Ablation => run_ablation(&experiment(g, || ExperimentSpec::ablation(150, 30))?, opts)?,
        Command::Tsp { n, seeds } => {
            if g.config.is_some() && n.is_some() {
                return Err(Error::Spec("--n cannot be combined with --config; set `problem` in the file".into()));
            }
            let n = n.unwrap_or(50);
            let mut spec = experiment(g, || ExperimentSpec::tsp(n, vec![42, 101, 202], None))?;
            if let Some(seeds) = seeds {
                spec.seeds = seeds.clone();
            }
            run_tsp_suite(&spec, opts)?
        }
        Command::Continuous { external } => {
            let mut spec = experiment(g, || ExperimentSpec::continuous(150, 30))?;
            spec.external.extend(external.iter().cloned());
            run_continuous_comparison(&spec, opts)?
        }
    };
    print_report(&report);
    Ok(())
}

/// The experiment from `--config` or `default`, with the global flags applied.
fn experiment(g: &Global, default: impl FnOnce() -> ExperimentSpec) -> Result<ExperimentSpec> {
    let mut spec = match &g.config {
        Some(path) => ExperimentSpec::load(path)?,
        None => default(),
    };
    if let Some(budget) = g.budget {
        spec.budget = budget;
    }
    if g.seed.is_some() || g.runs.is_some() {
        let start = g.seed.unwrap_or(spec.seeds[0]);
        let runs = g.runs.unwrap_or(spec.seeds.len()) as u64;
        spec.seeds = (start..start + runs).collect();
    }
    if let Some(out) = &g.out {
        spec.output_dir = out.clone();
    }
    if let Some(delay) = g.delay {
        spec.delay = delay;
    }
    Ok(spec)
}

fn single(g: &Global, problem: Problem, algo: &str) -> Result<()> {
    if g.config.is_some() || g.runs.is_some() {
        return Err(Error::Spec("--config and --runs apply to the experiment subcommands".into()));
    }
    let seed = g.seed.unwrap_or(0);
    let config = OptimizerSpec::new(algo, algo).config(g.budget.unwrap_or(problem.default_budget()), seed)?;
    let delay = g.delay.unwrap_or(0.0);
    if !(delay >= 0.0 && delay.is_finite()) {
        return Err(Error::Spec(format!("delay must be a non-negative number of seconds, got {delay}")));
    }
    let record = run_single(problem, &config, Duration::from_secs_f64(delay))?;
    let record = if g.timing { record } else { record.without_timing() };
    let json = record.to_json()?;
    if let Some(out) = &g.out {
        let dir = out.join("single").join(algo);
        std::fs::create_dir_all(&dir).map_err(|source| Error::Io { path: dir.clone(), source })?;
        let path = dir.join(format!("{problem}_seed{seed}.json"));
        std::fs::write(&path, format!("{json}\n")).map_err(|source| Error::Io { path, source })?;
    }
    let mut stdout = std::io::stdout().lock();
    match writeln!(stdout, "{json}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io { path: "<stdout>".into(), source: e }),
        _ => Ok(()),
    }
}

fn print_report(report: &Report) {
    println!(
        "{} on {} (budget {}, {} seeds)",
        report.spec.name,
        report.spec.problem,
        report.spec.budget,
        report.spec.seeds.len()
    );
    println!(
        "{:<18} {:>4} {:>14} {:>14} {:>8} {:>14} {:>10} {:>8}",
        "variant", "n", "mean", "std", "cv", "median", "p", "d"
    );
    let opt = |v: Option<f64>, prec: usize| v.map_or_else(|| "-".to_string(), |v| format!("{v:.prec$}"));
    for r in &report.table.rows {
        println!(
            "{:<18} {:>4} {:>14.4} {:>14.4} {:>8} {:>14.4} {:>10} {:>8}",
            r.variant,
            r.n,
            r.mean,
            r.std,
            opt(r.cv, 3),
            r.median,
            opt(r.p_value_vs_baseline, 4),
            opt(r.cohens_d_vs_baseline, 3)
        );
    }
    println!("results written to {}", report.dir.display());
}
