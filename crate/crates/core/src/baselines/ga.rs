use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{BaselineConfig, Session};
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::record::RunRecord;
use crate::rng::RngStream;
use crate::space::{apply_move, Candidate, Position, SearchSpace, TourMove};

/// Generational genetic algorithm with tournament selection, elitism of one,
/// order crossover (tours) or uniform crossover (boxes), and segment-reversal
/// (tours) or per-gene Gaussian (boxes) mutation.
///
/// Children identical to their parent keep the parent's value instead of
/// being re-evaluated; the run stops when the budget is spent or a whole
/// generation produced no new individual.
pub fn run_ga(objective: &dyn Objective, cfg: &BaselineConfig) -> Result<RunRecord> {
    if cfg.population_size as u64 > cfg.budget {
        return Err(Error::Config(format!(
            "population of {} exceeds the budget of {}",
            cfg.population_size, cfg.budget
        )));
    }
    let mut s = Session::new(objective, cfg)?;
    let space = objective.space().clone();

    let mut population = Vec::with_capacity(cfg.population_size);
    for _ in 0..cfg.population_size {
        let p = space.sample(&mut s.rng);
        match s.evaluate(p) {
            Some(c) => population.push(c),
            None => return s.finish(None),
        }
    }

    'generations: loop {
        let elite = best_of(&population).clone();
        let mut next = vec![elite];
        let mut evaluated = 0;
        while next.len() < cfg.population_size {
            let a = tournament(&population, cfg.tournament_size, &mut s.rng).clone();
            let b = tournament(&population, cfg.tournament_size, &mut s.rng).clone();
            let crossed = s.rng.random::<f64>() < cfg.crossover_rate;
            let (ca, cb) = if crossed {
                crossover(&a.position, &b.position, &mut s.rng)
            } else {
                (a.position.clone(), b.position.clone())
            };
            for (child, parent) in [(ca, a), (cb, b)] {
                if next.len() == cfg.population_size {
                    break;
                }
                let (child, mutated) = mutate(child, &space, cfg, &mut s.rng);
                if crossed || mutated {
                    match s.evaluate(child) {
                        Some(c) => {
                            evaluated += 1;
                            next.push(c);
                        }
                        None => break 'generations,
                    }
                } else {
                    next.push(parent);
                }
            }
        }
        population = next;
        if evaluated == 0 {
            break;
        }
    }
    s.finish(None)
}

fn best_of(pop: &[Candidate]) -> &Candidate {
    pop.iter().min_by(|a, b| a.value_or_inf().total_cmp(&b.value_or_inf())).expect("non-empty population")
}

fn tournament<'p>(pop: &'p [Candidate], size: usize, rng: &mut RngStream) -> &'p Candidate {
    (0..size)
        .map(|_| &pop[rng.random_range(0..pop.len())])
        .min_by(|a, b| a.value_or_inf().total_cmp(&b.value_or_inf()))
        .expect("tournament size is positive")
}

fn crossover(a: &Position, b: &Position, rng: &mut RngStream) -> (Position, Position) {
    match (a, b) {
        (Position::Tour(x), Position::Tour(y)) => {
            let (c, d) = order_crossover(x, y, rng);
            (Position::Tour(c), Position::Tour(d))
        }
        (Position::Real(x), Position::Real(y)) => {
            let (mut c, mut d) = (x.clone(), y.clone());
            for i in 0..c.len() {
                if rng.random::<bool>() {
                    std::mem::swap(&mut c[i], &mut d[i]);
                }
            }
            (Position::Real(c), Position::Real(d))
        }
        _ => unreachable!("population shares one space"),
    }
}

/// Order crossover (OX): each child keeps a random slice of one parent in
/// place and fills the other positions with the remaining cities in the
/// order they appear in the other parent, starting after the slice.
pub fn order_crossover<R: Rng + ?Sized>(a: &[usize], b: &[usize], rng: &mut R) -> (Vec<usize>, Vec<usize>) {
    let n = a.len();
    let i = rng.random_range(0..n);
    let j = rng.random_range(0..n);
    let (lo, hi) = (i.min(j), i.max(j));
    (ox_child(a, b, lo, hi), ox_child(b, a, lo, hi))
}

fn ox_child(keep: &[usize], fill: &[usize], lo: usize, hi: usize) -> Vec<usize> {
    let n = keep.len();
    let mut child = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for k in lo..=hi {
        child[k] = keep[k];
        used[keep[k]] = true;
    }
    let mut pos = (hi + 1) % n;
    for k in 0..n {
        let city = fill[(hi + 1 + k) % n];
        if !used[city] {
            child[pos] = city;
            used[city] = true;
            pos = (pos + 1) % n;
        }
    }
    child
}

fn mutate(p: Position, space: &SearchSpace, cfg: &BaselineConfig, rng: &mut RngStream) -> (Position, bool) {
    match (p, space) {
        (Position::Tour(mut t), _) => {
            if rng.random::<f64>() < cfg.mutation_rate {
                apply_move(&mut t, TourMove::Reversal, rng);
                (Position::Tour(t), true)
            } else {
                (Position::Tour(t), false)
            }
        }
        (Position::Real(mut x), SearchSpace::Continuous { lower, upper }) => {
            let mut changed = false;
            for d in 0..x.len() {
                if rng.random::<f64>() < cfg.mutation_rate {
                    let z: f64 = StandardNormal.sample(rng);
                    x[d] = (x[d] + z * cfg.mutation_scale * (upper[d] - lower[d])).clamp(lower[d], upper[d]);
                    changed = true;
                }
            }
            (Position::Real(x), changed)
        }
        _ => unreachable!("position matches space"),
    }
}
