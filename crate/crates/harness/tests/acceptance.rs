//! Acceptance checks: prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use serde::Deserialize;
use yo_bench::{run_ablation, run_continuous_comparison, run_tsp_suite, ExperimentSpec, Report, RunOptions};
use yo_core::stats::{bootstrap_cv_greater, cohens_d, mann_whitney_u, median, summarize, welch_t_test};
use yo_core::yo::{metropolis_accept, reconstruct_temperature, sa_accept};
use yo_core::*;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn options() -> RunOptions {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    RunOptions { parallel: threads, timing: false }
}

fn scratch() -> tempfile::TempDir {
    tempfile::tempdir().expect("temporary directory")
}

fn all_problems() -> Vec<Box<dyn Objective>> {
    vec![
        Box::new(FunctionObjective::composite5d()),
        Box::new(FunctionObjective::rosenbrock5d()),
        Box::new(TspObjective::new(generate_tsp(50, 42).unwrap())),
    ]
}

type Optimizer = Box<dyn Fn(&dyn Objective, u64) -> Result<RunRecord>>;
type Criterion = (&'static str, fn() -> Verdict);

/// Every optimizer, as a closure running it with `seed`.
fn optimizers(budget: u64) -> Vec<(&'static str, Optimizer)> {
    let mut list: Vec<(&'static str, Optimizer)> =
        vec![("yo", Box::new(move |f, seed| run(f, &YoConfig { budget, seed, ..YoConfig::default() })))];
    for alg in Algorithm::ALL {
        list.push((alg.name(), Box::new(move |f, seed| run_baseline(f, &BaselineConfig::new(alg, budget, seed)))));
    }
    list
}

fn applicable(name: &str, f: &dyn Objective) -> bool {
    name != "apso" || f.space().is_continuous()
}

fn budget_conservation() -> Verdict {
    let mut checked = 0;
    for budget in [150, 20_000] {
        for f in all_problems() {
            let f = Counted::new(f);
            for (name, opt) in optimizers(budget) {
                if !applicable(name, &f) {
                    continue;
                }
                f.reset();
                let rec = opt(&f, 1).unwrap();
                if rec.evaluations_used > budget || f.calls() != rec.evaluations_used {
                    return verdict(
                        false,
                        format!(
                            "{name} on {} at {budget}: used {} counted {}",
                            f.name(),
                            rec.evaluations_used,
                            f.calls()
                        ),
                    );
                }
                checked += 1;
            }
        }
    }
    verdict(true, format!("{checked} (optimizer, problem, budget) runs: counted calls = ledger count ≤ budget"))
}

fn determinism() -> Verdict {
    let mut checked = 0;
    for f in all_problems() {
        for (name, opt) in optimizers(if f.space().is_continuous() { 150 } else { 5000 }) {
            if !applicable(name, &f) {
                continue;
            }
            let a = opt(f.as_ref(), 17).unwrap().without_timing().to_json().unwrap();
            let b = opt(f.as_ref(), 17).unwrap().without_timing().to_json().unwrap();
            if a != b {
                return verdict(false, format!("{name} on {} differs between identical runs", f.name()));
            }
            checked += 1;
        }
    }
    verdict(true, format!("{checked} optimizer/problem pairs byte-identical across reruns"))
}

fn acceptance_law() -> Verdict {
    const TRIALS: u32 = 100_000;
    let mut rng = RngStream::new(2024);
    let mut worst: f64 = 0.0;
    for delta in [0.1f64, 0.5, 1.0, 2.0] {
        for t in [0.5, 1.0, 2.0, 5.0] {
            let p = (-delta / t).exp();
            let sigma = (p * (1.0 - p) / TRIALS as f64).sqrt();
            for rule in ["metropolis", "annealing"] {
                let hits = (0..TRIALS)
                    .filter(|_| match rule {
                        "metropolis" => metropolis_accept(1.0 + delta, 1.0, t, &mut rng).unwrap(),
                        _ => sa_accept(1.0 + delta, 1.0, t, false, &mut rng).unwrap(),
                    })
                    .count();
                let z = (hits as f64 / TRIALS as f64 - p).abs() / sigma;
                worst = worst.max(z);
                if z > 3.0 {
                    return verdict(false, format!("{rule} at Δ={delta}, T={t}: {z:.2}σ from exp(−Δ/T)"));
                }
            }
        }
    }
    verdict(true, format!("32 cells × 1e5 trials, largest deviation {worst:.2}σ ≤ 3σ"))
}

fn temperature_ledger() -> Verdict {
    let mut rng = RngStream::new(99);
    let mut logs = 0;
    let mut worst: f64 = 0.0;
    let problems = all_problems();
    for run_index in 0..60u64 {
        let f = &problems[run_index as usize % problems.len()];
        let chains = rng.random_range(1..6);
        let cfg = YoConfig {
            budget: if f.space().is_continuous() { rng.random_range(100..2000) } else { rng.random_range(500..4000) },
            seed: run_index,
            chains,
            top_k: rng.random_range(1..=chains),
            beta: rng.random_range(0.8..0.999),
            gamma: rng.random_range(1.1..5.0),
            theta_reheat: rng.random_range(1..30),
            t0: rng.random_bool(0.5).then(|| rng.random_range(0.1..100.0)),
            ..YoConfig::default()
        };
        let rec = run(f.as_ref(), &cfg).unwrap();
        for log in &rec.events {
            let t = reconstruct_temperature(log.t0, &cfg, &log.events);
            let rel = (t - log.final_temperature).abs() / log.final_temperature;
            worst = worst.max(rel);
            if rel > 1e-9 {
                return verdict(false, format!("run {run_index} chain {}: relative error {rel:e}", log.chain));
            }
            logs += 1;
        }
    }
    verdict(true, format!("{logs} chain logs from 60 randomized runs, worst relative error {worst:e} ≤ 1e-9"))
}

fn brute_force_optimum(inst: &TspInstance) -> f64 {
    fn permute(xs: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
        if k == xs.len() {
            visit(xs);
            return;
        }
        for i in k..xs.len() {
            xs.swap(k, i);
            permute(xs, k + 1, visit);
            xs.swap(k, i);
        }
    }
    let mut rest: Vec<usize> = (1..inst.len()).collect();
    let mut best = f64::INFINITY;
    permute(&mut rest, 0, &mut |p| {
        let mut tour = vec![0];
        tour.extend_from_slice(p);
        best = best.min(tour_length(inst, &tour).unwrap());
    });
    best
}

fn small_tsp_oracle() -> Verdict {
    let (mut restart_hits, mut yo_hits) = (0, 0);
    for k in 0..20u64 {
        let n = 5 + (k % 4) as usize;
        let inst = generate_tsp(n, 7000 + k).unwrap();
        let opt = brute_force_optimum(&inst);
        let f = TspObjective::new(inst);
        let matches = |v: f64| (v - opt).abs() <= 1e-9 * opt;
        let restart = run_baseline(&f, &BaselineConfig::new(Algorithm::TwoOptRestart, 10_000, k)).unwrap();
        let yo = run(&f, &YoConfig { budget: 10_000, seed: k, ..YoConfig::default() }).unwrap();
        restart_hits += matches(restart.best_value) as usize;
        yo_hits += matches(yo.best_value) as usize;
    }
    verdict(
        restart_hits >= 19 && yo_hits >= 19,
        format!("exhaustive optimum matched by 2-opt restart {restart_hits}/20, hybrid {yo_hits}/20 (need ≥ 19)"),
    )
}

fn values<'r>(report: &'r Report, variant: &str) -> &'r [f64] {
    report.values(variant).unwrap_or_else(|| panic!("variant {variant} missing"))
}

fn tsp_echo() -> Verdict {
    let dir = scratch();
    let spec =
        ExperimentSpec { output_dir: dir.path().into(), ..ExperimentSpec::tsp(50, vec![42, 101, 202], Some(20_000)) };
    let report = run_tsp_suite(&spec, options()).unwrap();
    let mean = |v: &str| yo_core::stats::mean(values(&report, v));
    let (yo, two, sa, ga) = (mean("yo"), mean("two_opt_restart"), mean("sa"), mean("ga"));
    let within = (yo - two).abs() <= 0.05 * two;
    verdict(
        within && yo < sa && yo < ga,
        format!(
            "means: hybrid {yo:.2}, 2-opt restart {two:.2} (gap {:+.2}%), SA {sa:.2}, GA {ga:.2}",
            100.0 * (yo - two) / two
        ),
    )
}

fn ablation_echo() -> Verdict {
    let dir = scratch();
    let spec = ExperimentSpec { output_dir: dir.path().into(), ..ExperimentSpec::ablation(150, 30) };
    let report = run_ablation(&spec, options()).unwrap();
    let a0 = values(&report, "A0");
    let m0 = yo_core::stats::mean(a0);
    let mut notes = Vec::new();
    let mut pass = true;
    for v in ["A1", "A2"] {
        let other = values(&report, v);
        let p = welch_t_test(a0, other).unwrap().p_less();
        let m = yo_core::stats::mean(other);
        pass &= m0 <= m && p < 0.1;
        notes.push(format!("A0 {m0:.1} vs {v} {m:.1} p={p:.4}"));
    }
    let cv = bootstrap_cv_greater(values(&report, "A5"), a0, 10_000, 0.9, 1).unwrap();
    pass &= cv.a_greater();
    notes.push(format!("CV A5 {:.3} vs A0 {:.3}, 90% lower bound {:+.4}", cv.cv_a, cv.cv_b, cv.lower_bound));
    let p4 = welch_t_test(values(&report, "A4"), a0).unwrap().p_value;
    pass &= p4 > 0.05;
    notes.push(format!("A4 vs A0 p={p4:.3}"));
    verdict(pass, notes.join("; "))
}

fn rosenbrock_echo() -> Verdict {
    let dir = scratch();
    let spec = ExperimentSpec { output_dir: dir.path().into(), ..ExperimentSpec::continuous(150, 30) };
    let report = run_continuous_comparison(&spec, options()).unwrap();
    let (yo, rs) = (values(&report, "yo"), values(&report, "random_search"));
    let mw = mann_whitney_u(yo, rs).unwrap();
    let best = yo.iter().copied().fold(f64::INFINITY, f64::min);
    let (my, mr) = (median(yo), median(rs));
    verdict(
        my < mr && mw.p_less < 0.05 && best < 500.0,
        format!(
            "median hybrid {my:.1} vs random {mr:.1}, Mann–Whitney p={:.2e}; hybrid best {best:.2} (< 500)",
            mw.p_less
        ),
    )
}

#[derive(Deserialize)]
struct Fixture {
    cases: Vec<Case>,
}

#[derive(Deserialize)]
struct FixtureSummary {
    n: usize,
    mean: f64,
    std: f64,
    min: f64,
    max: f64,
    median: f64,
}

#[derive(Deserialize)]
struct Case {
    a: Vec<f64>,
    b: Vec<f64>,
    summary_a: FixtureSummary,
    summary_b: FixtureSummary,
    t: f64,
    dof: f64,
    p_value: f64,
    cohens_d: f64,
}

fn statistics_oracle() -> Verdict {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/stats_reference.json");
    let fixture: Fixture = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let close = |got: f64, want: f64| (got - want).abs() <= 1e-8 * want.abs().max(1.0);
    for (k, case) in fixture.cases.iter().enumerate() {
        for (xs, want) in [(&case.a, &case.summary_a), (&case.b, &case.summary_b)] {
            let s = summarize(xs).unwrap();
            let ok = s.n == want.n
                && close(s.mean, want.mean)
                && close(s.std, want.std)
                && close(s.min, want.min)
                && close(s.max, want.max)
                && close(s.median, want.median);
            if !ok {
                return verdict(false, format!("summary of case {k} differs"));
            }
        }
        let w = welch_t_test(&case.a, &case.b).unwrap();
        let d = cohens_d(&case.a, &case.b).unwrap();
        if !(close(w.t, case.t)
            && close(w.dof, case.dof)
            && (w.p_value - case.p_value).abs() <= 1e-8
            && close(d, case.cohens_d))
        {
            return verdict(false, format!("tests of case {k} differ"));
        }
    }
    // standardized sample: mean 0, sample std exactly 1, shifted by 1
    let mut rng = RngStream::new(5);
    let raw: Vec<f64> = (0..200).map(|_| rng.random_range(-1.0..1.0)).collect();
    let (m, sd) = (yo_core::stats::mean(&raw), yo_core::stats::variance(&raw).sqrt());
    let b: Vec<f64> = raw.iter().map(|x| (x - m) / sd).collect();
    let a: Vec<f64> = b.iter().map(|x| x + 1.0).collect();
    let d = cohens_d(&a, &b).unwrap();
    verdict(
        (d - 1.0).abs() <= 1e-9 && fixture.cases.len() == 100,
        format!("{} fixture pairs agree to 1e-8; synthetic d = {d:.12}", fixture.cases.len()),
    )
}

fn blacklist_correctness() -> Verdict {
    let mut rng = RngStream::new(31);
    // membership queries never evaluate or charge
    let f = Counted::new(FunctionObjective::composite5d());
    let ledger = BudgetLedger::flat(10).unwrap();
    let mut bl = Blacklist::new(f.space(), 64).unwrap();
    for _ in 0..64 {
        bl.add_region(&Candidate::new(f.space().sample(&mut rng)), 0.3).unwrap();
    }
    for _ in 0..1000 {
        bl.contains(&Candidate::new(f.space().sample(&mut rng))).unwrap();
    }
    if f.calls() != 0 || ledger.used() != 0 || bl.hits() == 0 {
        return verdict(false, format!("contains charged: calls {}, ledger {}", f.calls(), ledger.used()));
    }
    for case in 0..1000 {
        // first-in-first-out eviction
        let cap = rng.random_range(1..12);
        let extra = rng.random_range(0..12);
        let total = cap + extra;
        let space = SearchSpace::hypercube(2, 0.0, 1.0).unwrap();
        let mut bl = Blacklist::new(&space, cap).unwrap();
        let point = |k: usize| Candidate::new(Position::Real(vec![k as f64 / total as f64, 0.5]));
        for k in 0..total {
            bl.add_region(&point(k), 0.1 / total as f64).unwrap();
        }
        if bl.len() != cap || (0..total).any(|k| bl.contains(&point(k)).unwrap() != (k >= extra)) {
            return verdict(false, format!("eviction case {case} (capacity {cap}, {extra} extra) is not FIFO"));
        }
        // every rotation and reflection of a blacklisted tour is a member
        let n = rng.random_range(3..12);
        let tour_space = SearchSpace::permutation(n).unwrap();
        let t = tour_space.sample(&mut rng).as_tour().unwrap().to_vec();
        let mut bl = Blacklist::new(&tour_space, 8).unwrap();
        bl.add_region(&Candidate::new(Position::Tour(t.clone())), 0.01).unwrap();
        let shift = rng.random_range(0..n);
        let mut u: Vec<usize> = (0..n).map(|k| t[(k + shift) % n]).collect();
        if rng.random_bool(0.5) {
            u.reverse();
        }
        if !bl.contains(&Candidate::new(Position::Tour(u))).unwrap() {
            return verdict(false, format!("orbit case {case}: rotated/reflected tour not a member"));
        }
    }
    verdict(true, "1000 free membership queries; 1000 FIFO and 1000 tour-orbit cases")
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("budget conservation", budget_conservation),
        ("determinism", determinism),
        ("acceptance law", acceptance_law),
        ("temperature ledger", temperature_ledger),
        ("small-TSP oracle", small_tsp_oracle),
        ("TSP50 directional echo", tsp_echo),
        ("ablation directional echo", ablation_echo),
        ("Rosenbrock 5D", rosenbrock_echo),
        ("statistics oracle", statistics_oracle),
        ("blacklist correctness", blacklist_correctness),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        failed += !v.pass as usize;
        println!(
            "{} criterion {:>2} ({name}): {} [{:.1}s]",
            if v.pass { "PASS" } else { "FAIL" },
            i + 1,
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
