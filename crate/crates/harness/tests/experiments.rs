//! Experiment outputs are consistent with the raw run records on disk.

use std::collections::BTreeMap;

use yo_bench::{run_ablation, run_tsp_suite, ExperimentSpec, Problem, RunOptions};
use yo_core::stats::{cohens_d, summarize, welch_t_test};
use yo_core::RunRecord;

#[test]
fn summary_recomputes_from_run_records() {
    let dir = tempfile::tempdir().unwrap();
    let spec = ExperimentSpec { output_dir: dir.path().into(), ..ExperimentSpec::ablation(150, 5) };
    let report = run_ablation(&spec, RunOptions::default()).unwrap();
    let mut finals: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for opt in &spec.optimizers {
        for seed in &spec.seeds {
            let path = dir.path().join(format!("ablation/{}/seed{seed}.json", opt.name));
            let rec = RunRecord::from_json(&std::fs::read_to_string(path).unwrap()).unwrap();
            finals.entry(opt.name.clone()).or_default().push(rec.best_value);
        }
    }
    let reference = &finals["A0"];
    let mut reader = csv::Reader::from_path(dir.path().join("ablation/summary.csv")).unwrap();
    for row in reader.records() {
        let row = row.unwrap();
        let values = &finals[&row[0]];
        let s = summarize(values).unwrap();
        assert_eq!(row[2].parse::<f64>().unwrap(), s.mean);
        assert_eq!(row[3].parse::<f64>().unwrap(), s.std);
        assert_eq!(row[6].parse::<f64>().unwrap(), s.median);
        if &row[0] != "A0" {
            assert_eq!(row[9].parse::<f64>().unwrap(), welch_t_test(reference, values).unwrap().p_value);
            assert_eq!(row[10].parse::<f64>().unwrap(), cohens_d(reference, values).unwrap());
        }
    }
    assert_eq!(report.table.rows.len(), 6);
}

#[test]
fn blacklist_off_matches_when_it_never_fires() {
    let dir = tempfile::tempdir().unwrap();
    let spec = ExperimentSpec { output_dir: dir.path().into(), ..ExperimentSpec::ablation(150, 8) };
    let report = run_ablation(&spec, RunOptions::default()).unwrap();
    // at this budget refined points never rank above the 0.9 quantile
    assert!(report.runs.iter().filter(|r| r.variant == "A0").all(|r| r
        .record
        .blacklist
        .as_ref()
        .is_some_and(|b| b.additions == 0)));
    assert_eq!(report.values("A0"), report.values("A4"));
}

#[test]
fn tsp_algorithms_share_each_instance() {
    let dir = tempfile::tempdir().unwrap();
    let spec = ExperimentSpec { output_dir: dir.path().into(), ..ExperimentSpec::tsp(15, vec![1, 2], Some(3000)) };
    let report = run_tsp_suite(&spec, RunOptions { parallel: 3, timing: false }).unwrap();
    for seed in [1, 2] {
        let inst = Problem::Tsp(15).instance(seed).unwrap().unwrap();
        for run in report.runs.iter().filter(|r| r.seed == seed) {
            let tour = run.record.best.position.as_tour().unwrap();
            assert_eq!(yo_core::tour_length(&inst, tour).unwrap(), run.record.best_value, "{}", run.variant);
        }
    }
    assert_eq!(report.table.reference, "yo");
}

#[test]
fn studies_reject_the_wrong_problem() {
    let spec = ExperimentSpec { problem: Problem::Rosenbrock5d, ..ExperimentSpec::ablation(150, 2) };
    assert!(run_ablation(&spec, RunOptions::default()).is_err());
    assert!(run_tsp_suite(&ExperimentSpec::continuous(150, 2), RunOptions::default()).is_err());
}

#[test]
fn timing_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let spec = ExperimentSpec { output_dir: dir.path().into(), ..ExperimentSpec::continuous(150, 2) };
    let timed = yo_bench::run_continuous_comparison(&spec, RunOptions { parallel: 1, timing: true }).unwrap();
    assert!(timed.runs.iter().all(|r| r.record.wall_time_ms.is_some()));
    assert!(timed.table.rows.iter().all(|r| r.runtime_mean_ms.is_some()));
    let untimed = yo_bench::run_continuous_comparison(&spec, RunOptions::default()).unwrap();
    assert!(untimed.table.rows.iter().all(|r| r.runtime_mean_ms.is_none()));
}

#[test]
fn shipped_configs_load() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let expected = [
        ("ablation.toml", 150, 30, 6),
        ("continuous.toml", 150, 30, 3),
        ("tsp50.toml", 20_000, 3, 5),
        ("tsp100.toml", 50_000, 3, 5),
        ("tsp200.toml", 100_000, 3, 5),
    ];
    for (file, budget, seeds, optimizers) in expected {
        let spec = ExperimentSpec::load(&dir.join(file)).unwrap();
        assert_eq!((spec.budget, spec.seeds.len(), spec.optimizers.len()), (budget, seeds, optimizers), "{file}");
    }
    assert_eq!(
        ExperimentSpec::load(&dir.join("ablation.toml")).unwrap().optimizers,
        ExperimentSpec::ablation(150, 30).optimizers
    );
}
