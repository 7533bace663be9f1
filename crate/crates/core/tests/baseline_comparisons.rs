use yo_core::stats::{mann_whitney_u, median};
use yo_core::*;

fn finals(f: &dyn Objective, alg: Algorithm, budget: u64) -> Vec<f64> {
    (0..30).map(|seed| run_baseline(f, &BaselineConfig::new(alg, budget, seed)).unwrap().best_value).collect()
}

#[test]
fn swarm_beats_random_search_on_sphere() {
    let f = FunctionObjective::sphere(SearchSpace::hypercube(5, -5.12, 5.12).unwrap()).unwrap();
    let apso = finals(&f, Algorithm::Apso, 150);
    let random = finals(&f, Algorithm::RandomSearch, 150);
    assert!(median(&apso) < median(&random));
    assert!(mann_whitney_u(&apso, &random).unwrap().p_less < 0.05);
}

#[test]
fn local_search_beats_random_search_on_tours() {
    let f = TspObjective::new(generate_tsp(30, 3).unwrap());
    let restart = finals(&f, Algorithm::TwoOptRestart, 3000);
    let random = finals(&f, Algorithm::RandomSearch, 3000);
    assert!(mann_whitney_u(&restart, &random).unwrap().p_less < 1e-6);
}
