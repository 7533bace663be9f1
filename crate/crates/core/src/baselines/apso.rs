use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{BaselineConfig, Session};
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::record::RunRecord;
use crate::space::{Position, SearchSpace};

/// Accelerated particle swarm optimisation (no velocity term).
///
/// Each generation moves every particle with [`apso_step`] towards the
/// global best of the previous generation, then evaluates the whole swarm;
/// the noise amplitude shrinks by `noise_decay` per generation.
pub fn run_apso(objective: &dyn Objective, cfg: &BaselineConfig) -> Result<RunRecord> {
    let SearchSpace::Continuous { .. } = objective.space() else {
        return Err(Error::UnsupportedSpace("particle swarm needs a continuous space".into()));
    };
    let mut s = Session::new(objective, cfg)?;
    let space = objective.space().clone();

    let mut swarm: Vec<Vec<f64>> = Vec::with_capacity(cfg.swarm_size);
    for _ in 0..cfg.swarm_size {
        let Position::Real(x) = space.sample(&mut s.rng) else { unreachable!() };
        swarm.push(x);
    }
    let mut alpha = cfg.noise_alpha;
    let mut first = true;
    'generations: while s.remaining() > 0 {
        if !first {
            let Some(Position::Real(g)) = s.best.as_ref().map(|b| b.position.clone()) else { break };
            apso_step(&mut swarm, &g, cfg.attraction_beta, alpha, &space, &mut s.rng);
            alpha *= cfg.noise_decay;
        }
        first = false;
        for x in &swarm {
            if s.evaluate(Position::Real(x.clone())).is_none() {
                break 'generations;
            }
        }
    }
    s.finish(None)
}

/// One synchronous swarm move:
/// `x ← (1 − beta)·x + beta·g + alpha·range·ε`, with `ε` standard normal per
/// dimension, clamped to the bounds.
pub fn apso_step<R: Rng + ?Sized>(
    swarm: &mut [Vec<f64>],
    gbest: &[f64],
    attraction_beta: f64,
    noise_alpha: f64,
    space: &SearchSpace,
    rng: &mut R,
) {
    let SearchSpace::Continuous { lower, upper } = space else { return };
    for x in swarm.iter_mut() {
        for d in 0..x.len() {
            let noise = if noise_alpha > 0.0 {
                let z: f64 = StandardNormal.sample(rng);
                noise_alpha * (upper[d] - lower[d]) * z
            } else {
                0.0
            };
            x[d] = ((1.0 - attraction_beta) * x[d] + attraction_beta * gbest[d] + noise).clamp(lower[d], upper[d]);
        }
    }
}
