//! Search spaces, candidates and the proposal kernel.
//!
//! Two kinds of space are supported: a bounded continuous hyperbox and the
//! set of tours over `n` cities. Proposals are symmetric in both, so the
//! Metropolis ratio reduces to the ratio of objective values.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchSpace {
    /// Axis-aligned box `[lower[i], upper[i]]`.
    Continuous { lower: Vec<f64>, upper: Vec<f64> },
    /// Closed tours visiting each of `n` cities exactly once.
    Permutation { n: usize },
}

impl SearchSpace {
    pub fn continuous(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidDimension { min: 1, got: 0 });
        }
        if lower.len() != upper.len() {
            return Err(Error::Config(format!("bound vectors differ in length ({} vs {})", lower.len(), upper.len())));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Config(format!("dimension {i}: lower bound {lo} must be below upper bound {hi}")));
            }
        }
        Ok(SearchSpace::Continuous { lower, upper })
    }

    /// The cube `[lo, hi]^dim`.
    pub fn hypercube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::continuous(vec![lo; dim], vec![hi; dim])
    }

    pub fn permutation(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidSize { min: 3, got: n });
        }
        Ok(SearchSpace::Permutation { n })
    }

    /// Dimension `D` of a box, or city count of a permutation space.
    pub fn dim(&self) -> usize {
        match self {
            SearchSpace::Continuous { lower, .. } => lower.len(),
            SearchSpace::Permutation { n } => *n,
        }
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self, SearchSpace::Continuous { .. })
    }

    /// Checks the candidate invariants for this space.
    pub fn validate(&self, position: &Position) -> Result<()> {
        match (self, position) {
            (SearchSpace::Continuous { lower, upper }, Position::Real(x)) => {
                if x.len() != lower.len() {
                    return Err(Error::Contract(format!("point has dimension {}, space has {}", x.len(), lower.len())));
                }
                for (i, v) in x.iter().enumerate() {
                    if !(v.is_finite() && *v >= lower[i] && *v <= upper[i]) {
                        return Err(Error::Contract(format!(
                            "coordinate {i} = {v} outside [{}, {}]",
                            lower[i], upper[i]
                        )));
                    }
                }
                Ok(())
            }
            (SearchSpace::Permutation { n }, Position::Tour(t)) => {
                if is_permutation(t, *n) {
                    Ok(())
                } else {
                    Err(Error::Contract(format!("tour is not a permutation of 0..{n}")))
                }
            }
            _ => Err(Error::Contract("candidate kind does not match search space".into())),
        }
    }

    /// Uniform draw from the space: per-dimension uniform in the box, or a
    /// uniformly shuffled tour.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Position {
        match self {
            SearchSpace::Continuous { lower, upper } => {
                Position::Real(lower.iter().zip(upper).map(|(lo, hi)| rng.random_range(*lo..=*hi)).collect())
            }
            SearchSpace::Permutation { n } => {
                let mut tour: Vec<usize> = (0..*n).collect();
                // Fisher-Yates
                for i in (1..tour.len()).rev() {
                    let j = rng.random_range(0..=i);
                    tour.swap(i, j);
                }
                Position::Tour(tour)
            }
        }
    }

    /// Maps a point of a box into `[0, 1]^D`.
    pub fn normalize(&self, x: &[f64]) -> Option<Vec<f64>> {
        match self {
            SearchSpace::Continuous { lower, upper } => {
                Some(x.iter().zip(lower.iter().zip(upper)).map(|(v, (lo, hi))| (v - lo) / (hi - lo)).collect())
            }
            SearchSpace::Permutation { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Position {
    Real(Vec<f64>),
    Tour(Vec<usize>),
}

impl Position {
    pub fn as_real(&self) -> Option<&[f64]> {
        match self {
            Position::Real(x) => Some(x),
            Position::Tour(_) => None,
        }
    }

    pub fn as_tour(&self) -> Option<&[usize]> {
        match self {
            Position::Tour(t) => Some(t),
            Position::Real(_) => None,
        }
    }
}

/// A point of a search space with its objective value once evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub position: Position,
    pub value: Option<f64>,
}

impl Candidate {
    pub fn new(position: Position) -> Self {
        Candidate { position, value: None }
    }

    pub fn evaluated(position: Position, value: f64) -> Self {
        Candidate { position, value: Some(value) }
    }

    /// Objective value, or `+inf` for an unevaluated candidate.
    pub fn value_or_inf(&self) -> f64 {
        self.value.unwrap_or(f64::INFINITY)
    }
}

/// Permutation moves available to the proposal kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TourMove {
    Reversal,
    Swap,
    Insertion,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProposalParams {
    /// Gaussian step standard deviation as a fraction of each dimension's range.
    pub step_scale: f64,
    /// Probabilities of segment reversal, swap and insertion.
    pub move_mix: [f64; 3],
}

impl Default for ProposalParams {
    fn default() -> Self {
        ProposalParams { step_scale: 0.1, move_mix: [0.7, 0.2, 0.1] }
    }
}

impl ProposalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_scale > 0.0 && self.step_scale.is_finite()) {
            return Err(Error::Config(format!("step_scale must be positive, got {}", self.step_scale)));
        }
        if self.move_mix.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::Config("move_mix entries must be non-negative".into()));
        }
        let total: f64 = self.move_mix.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("move_mix must sum to 1, sums to {total}")));
        }
        Ok(())
    }

    fn draw_move<R: Rng + ?Sized>(&self, rng: &mut R) -> TourMove {
        let u: f64 = rng.random();
        let [rev, swap, _] = self.move_mix;
        if u < rev {
            TourMove::Reversal
        } else if u < rev + swap {
            TourMove::Swap
        } else {
            TourMove::Insertion
        }
    }
}

/// Draws a neighbour of `x`.
///
/// Boxes get an independent Gaussian step per dimension with standard
/// deviation `step_scale * (upper - lower)`, clamped to the bounds. Tours get
/// one move drawn from `move_mix`. The returned candidate is unevaluated.
pub fn mcmc_propose<R: Rng + ?Sized>(
    x: &Candidate,
    space: &SearchSpace,
    params: &ProposalParams,
    rng: &mut R,
) -> Result<Candidate> {
    space.validate(&x.position)?;
    let position = match (space, &x.position) {
        (SearchSpace::Continuous { lower, upper }, Position::Real(p)) => {
            if params.step_scale == 0.0 {
                Position::Real(p.clone())
            } else {
                let unit = Normal::new(0.0, 1.0).expect("unit normal");
                Position::Real(
                    p.iter()
                        .enumerate()
                        .map(|(i, v)| {
                            let sd = params.step_scale * (upper[i] - lower[i]);
                            (v + sd * unit.sample(rng)).clamp(lower[i], upper[i])
                        })
                        .collect(),
                )
            }
        }
        (SearchSpace::Permutation { .. }, Position::Tour(t)) => {
            let mut tour = t.clone();
            apply_move(&mut tour, params.draw_move(rng), rng);
            Position::Tour(tour)
        }
        _ => unreachable!("validated above"),
    };
    Ok(Candidate::new(position))
}

/// Applies one random move of the given kind in place.
pub fn apply_move<R: Rng + ?Sized>(tour: &mut [usize], mv: TourMove, rng: &mut R) {
    let n = tour.len();
    let (a, b) = distinct_pair(n, rng);
    match mv {
        TourMove::Reversal => tour[a.min(b)..=a.max(b)].reverse(),
        TourMove::Swap => tour.swap(a, b),
        TourMove::Insertion => {
            // remove at a, reinsert at b
            if a < b {
                tour[a..=b].rotate_left(1);
            } else {
                tour[b..=a].rotate_right(1);
            }
        }
    }
}

fn distinct_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

/// True iff `p` contains each of `0..n` exactly once.
pub fn is_permutation(p: &[usize], n: usize) -> bool {
    if p.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &c in p {
        if c >= n || seen[c] {
            return false;
        }
        seen[c] = true;
    }
    true
}

/// Representative of a tour's rotation/reflection class: rotated so city 0
/// comes first, then read in whichever direction has the smaller second city.
pub fn canonical_tour(p: &[usize]) -> Vec<usize> {
    let n = p.len();
    if n == 0 {
        return Vec::new();
    }
    let start = p.iter().position(|&c| c == 0).unwrap_or(0);
    let forward = p[(start + 1) % n];
    let backward = p[(start + n - 1) % n];
    if n < 3 || forward <= backward {
        (0..n).map(|k| p[(start + k) % n]).collect()
    } else {
        (0..n).map(|k| p[(start + n - k) % n]).collect()
    }
}
