//! Deterministic local refinement.
//!
//! Continuous candidates get coordinate-descent probing with a fixed step;
//! tours get first-improvement 2-opt. Every probe is a charged evaluation.

use serde::{Deserialize, Serialize};

use crate::budget::Evaluate;
use crate::space::{Candidate, Position, SearchSpace};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefineParams {
    /// Probe budget per call, not counting the evaluation of an unevaluated
    /// input.
    pub max_probes: usize,
    /// Coordinate step as a fraction of each dimension's range.
    pub step_scale: f64,
    /// Where the scan begins: a dimension index for boxes, an index into the
    /// 2-opt move list for tours (both taken modulo their length).
    pub start: usize,
}

impl RefineParams {
    pub fn new(max_probes: usize, step_scale: f64) -> Self {
        RefineParams { max_probes, step_scale, start: 0 }
    }

    pub fn starting_at(mut self, start: usize) -> Self {
        self.start = start;
        self
    }
}

/// Greedily improves `x` until a full scan finds no strictly better
/// neighbour, `max_probes` probes are spent, or the budget runs out.
///
/// An unevaluated `x` is evaluated first; `None` means even that evaluation
/// could not be charged. Otherwise the returned candidate carries its value
/// and is never worse than `x`.
pub fn greedy_refine<E: Evaluate + ?Sized>(x: Candidate, eval: &mut E, params: &RefineParams) -> Option<Candidate> {
    let value = match x.value {
        Some(v) => v,
        None => eval.evaluate(&x.position)?,
    };
    let current = Candidate::evaluated(x.position, value);
    let space = eval.space().clone();
    Some(match space {
        SearchSpace::Continuous { lower, upper } => coordinate_descent(current, eval, params, &lower, &upper),
        SearchSpace::Permutation { .. } => two_opt(current, eval, params),
    })
}

fn coordinate_descent<E: Evaluate + ?Sized>(
    mut current: Candidate,
    eval: &mut E,
    params: &RefineParams,
    lower: &[f64],
    upper: &[f64],
) -> Candidate {
    let dim = lower.len();
    let mut probes = 0;
    loop {
        let mut improved = false;
        for k in 0..dim {
            let d = (params.start + k) % dim;
            let step = params.step_scale * (upper[d] - lower[d]);
            for sign in [1.0, -1.0] {
                if probes >= params.max_probes {
                    return current;
                }
                let Position::Real(ref x) = current.position else { unreachable!() };
                let moved = (x[d] + sign * step).clamp(lower[d], upper[d]);
                if moved == x[d] {
                    continue;
                }
                let mut trial = x.clone();
                trial[d] = moved;
                let trial = Position::Real(trial);
                let Some(v) = eval.evaluate(&trial) else {
                    return current;
                };
                probes += 1;
                if v < current.value_or_inf() {
                    current = Candidate::evaluated(trial, v);
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            return current;
        }
    }
}

/// The standard 2-opt neighbourhood of an `n`-city tour: pairs `(i, j)`
/// whose move reverses `tour[i + 1..=j]`, in lexicographic order.
pub fn two_opt_moves(n: usize) -> Vec<(usize, usize)> {
    let mut moves = Vec::with_capacity(n * n.saturating_sub(3) / 2);
    for i in 0..n.saturating_sub(2) {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            moves.push((i, j));
        }
    }
    moves
}

fn two_opt<E: Evaluate + ?Sized>(mut current: Candidate, eval: &mut E, params: &RefineParams) -> Candidate {
    let n = match &current.position {
        Position::Tour(t) => t.len(),
        Position::Real(_) => unreachable!(),
    };
    let moves = two_opt_moves(n);
    if moves.is_empty() {
        return current;
    }
    let mut cursor = params.start % moves.len();
    let mut probes = 0;
    let mut since_improvement = 0;
    // A local optimum is certified by one full cycle of failed probes; after
    // an improvement the scan resumes at the next move.
    while since_improvement < moves.len() && probes < params.max_probes {
        let (i, j) = moves[cursor];
        let Position::Tour(ref t) = current.position else { unreachable!() };
        let mut trial = t.clone();
        trial[i + 1..=j].reverse();
        let trial = Position::Tour(trial);
        let Some(v) = eval.evaluate(&trial) else {
            break;
        };
        probes += 1;
        if v < current.value_or_inf() {
            current = Candidate::evaluated(trial, v);
            since_improvement = 0;
        } else {
            since_improvement += 1;
        }
        cursor = (cursor + 1) % moves.len();
    }
    current
}
