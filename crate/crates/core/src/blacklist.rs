//! Spatial memory of poor regions.
//!
//! Continuous spaces store hyperballs in coordinates normalized to the unit
//! box; permutation spaces store canonical tours exactly. Membership queries
//! never touch the objective.

use std::collections::{HashSet, VecDeque};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::space::{canonical_tour, Candidate, Position, SearchSpace};

pub const DEFAULT_MAX_REGIONS: usize = 256;
pub const DEFAULT_RADIUS: f64 = 0.02;

#[derive(Debug)]
enum Regions {
    Balls { lower: Vec<f64>, upper: Vec<f64>, balls: VecDeque<(Vec<f64>, f64)> },
    Tours { order: VecDeque<Vec<usize>>, members: HashSet<Vec<usize>> },
}

#[derive(Debug)]
pub struct Blacklist {
    regions: Regions,
    max_regions: usize,
    hits: AtomicU64,
    additions: u64,
}

impl Blacklist {
    pub fn new(space: &SearchSpace, max_regions: usize) -> Result<Self> {
        if max_regions == 0 {
            return Err(Error::Config("blacklist capacity must be positive".into()));
        }
        let regions = match space {
            SearchSpace::Continuous { lower, upper } => {
                Regions::Balls { lower: lower.clone(), upper: upper.clone(), balls: VecDeque::new() }
            }
            SearchSpace::Permutation { .. } => Regions::Tours { order: VecDeque::new(), members: HashSet::new() },
        };
        Ok(Blacklist { regions, max_regions, hits: AtomicU64::new(0), additions: 0 })
    }

    pub fn len(&self) -> usize {
        match &self.regions {
            Regions::Balls { balls, .. } => balls.len(),
            Regions::Tours { order, .. } => order.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of `contains` queries that answered true.
    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn additions(&self) -> u64 {
        self.additions
    }

    /// Whether `x` falls inside a stored region.
    pub fn contains(&self, x: &Candidate) -> Result<bool> {
        let hit = match (&self.regions, &x.position) {
            (Regions::Balls { lower, upper, balls }, Position::Real(p)) => {
                check_dim(p.len(), lower.len())?;
                let u = normalize(p, lower, upper);
                balls.iter().any(|(c, r)| distance(&u, c) <= *r)
            }
            (Regions::Tours { members, .. }, Position::Tour(t)) => members.contains(&canonical_tour(t)),
            _ => return Err(mismatch()),
        };
        if hit {
            self.hits.fetch_add(1, Ordering::Relaxed);
        }
        Ok(hit)
    }

    /// Inserts the region around `x`, evicting the oldest region when full.
    /// `radius` is in normalized units and ignored for tours.
    pub fn add_region(&mut self, x: &Candidate, radius: f64) -> Result<()> {
        match (&mut self.regions, &x.position) {
            (Regions::Balls { lower, upper, balls }, Position::Real(p)) => {
                check_dim(p.len(), lower.len())?;
                if !(radius > 0.0) {
                    return Err(Error::Contract(format!("region radius must be positive, got {radius}")));
                }
                if balls.len() == self.max_regions {
                    balls.pop_front();
                }
                balls.push_back((normalize(p, lower, upper), radius));
            }
            (Regions::Tours { order, members }, Position::Tour(t)) => {
                let key = canonical_tour(t);
                if !members.contains(&key) {
                    if order.len() == self.max_regions {
                        if let Some(old) = order.pop_front() {
                            members.remove(&old);
                        }
                    }
                    members.insert(key.clone());
                    order.push_back(key);
                }
            }
            _ => return Err(mismatch()),
        }
        self.additions += 1;
        Ok(())
    }
}

fn mismatch() -> Error {
    Error::Contract("candidate kind does not match blacklist space".into())
}

fn check_dim(got: usize, want: usize) -> Result<()> {
    if got == want {
        Ok(())
    } else {
        Err(Error::Contract(format!("point has dimension {got}, blacklist space has {want}")))
    }
}

fn normalize(p: &[f64], lower: &[f64], upper: &[f64]) -> Vec<f64> {
    p.iter().zip(lower.iter().zip(upper)).map(|(v, (lo, hi))| (v - lo) / (hi - lo)).collect()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Every objective value observed during a run, for the dynamic
/// "poor candidate" threshold.
#[derive(Debug, Default)]
pub struct ValueHistory {
    values: Mutex<Vec<f64>>,
}

impl ValueHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&self, v: f64) {
        self.values.lock().expect("value history poisoned").push(v);
    }

    pub fn len(&self) -> usize {
        self.values.lock().expect("value history poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Empirical `q`-quantile (linear interpolation between order
    /// statistics), or `None` while fewer than `warmup` values are recorded.
    pub fn quantile(&self, q: f64, warmup: usize) -> Option<f64> {
        let mut values = self.values.lock().expect("value history poisoned").clone();
        if values.is_empty() || values.len() < warmup {
            return None;
        }
        Some(quantile_in_place(&mut values, q))
    }
}

pub(crate) fn quantile_in_place(values: &mut [f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (values.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    let (_, lo_val, rest) = values.select_nth_unstable_by(lo, f64::total_cmp);
    let lo_val = *lo_val;
    if frac == 0.0 || rest.is_empty() {
        return lo_val;
    }
    let hi_val = rest.iter().copied().fold(f64::INFINITY, f64::min);
    lo_val + frac * (hi_val - lo_val)
}
