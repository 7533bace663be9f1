//! Benchmark objectives (minimization).

use std::f64::consts::PI;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::space::{Position, SearchSpace};

/// A deterministic black-box function over a search space.
///
/// Implementations must not keep per-call state that changes the returned
/// value; the optimizers rely on `evaluate` being a pure function of the
/// position. Positions passed in are always valid for `space()`.
pub trait Objective: Send + Sync {
    fn space(&self) -> &SearchSpace;
    fn evaluate(&self, position: &Position) -> f64;
    fn name(&self) -> &str;
}

impl<T: Objective + ?Sized> Objective for &T {
    fn space(&self) -> &SearchSpace {
        (**self).space()
    }
    fn evaluate(&self, position: &Position) -> f64 {
        (**self).evaluate(position)
    }
    fn name(&self) -> &str {
        (**self).name()
    }
}

impl<T: Objective + ?Sized> Objective for Arc<T> {
    fn space(&self) -> &SearchSpace {
        (**self).space()
    }
    fn evaluate(&self, position: &Position) -> f64 {
        (**self).evaluate(position)
    }
    fn name(&self) -> &str {
        (**self).name()
    }
}

impl<T: Objective + ?Sized> Objective for Box<T> {
    fn space(&self) -> &SearchSpace {
        (**self).space()
    }
    fn evaluate(&self, position: &Position) -> f64 {
        (**self).evaluate(position)
    }
    fn name(&self) -> &str {
        (**self).name()
    }
}

pub fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64 + x.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos()).sum::<f64>()
}

/// Sum over consecutive pairs of `100 (x[i+1] - x[i]^2)^2 + (1 - x[i])^2`.
pub fn rosenbrock(x: &[f64]) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::InvalidDimension { min: 2, got: x.len() });
    }
    Ok(rosenbrock_unchecked(x))
}

fn rosenbrock_unchecked(x: &[f64]) -> f64 {
    x.windows(2).map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2)).sum()
}

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Weights of the four terms of [`composite`]: Rastrigin, Rosenbrock, sphere
/// and the oscillation term `sum(sin(x_i)) + exp(|x| / D)`.
pub type CompositeWeights = [f64; 4];

pub const UNIT_WEIGHTS: CompositeWeights = [1.0; 4];

/// Weighted sum of Rastrigin, Rosenbrock, sphere and a sine/exponential term.
pub fn composite(x: &[f64], weights: &CompositeWeights) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::InvalidDimension { min: 2, got: x.len() });
    }
    Ok(composite_unchecked(x, weights))
}

fn composite_unchecked(x: &[f64], w: &CompositeWeights) -> f64 {
    let d = x.len() as f64;
    let oscillation = x.iter().map(|v| v.sin()).sum::<f64>() + (sphere(x).sqrt() / d).exp();
    w[0] * rastrigin(x) + w[1] * rosenbrock_unchecked(x) + w[2] * sphere(x) + w[3] * oscillation
}

/// [`composite`] with an optional sleep simulating an expensive evaluation.
pub fn composite_expensive(x: &[f64], weights: &CompositeWeights, delay: Duration) -> Result<f64> {
    let v = composite(x, weights)?;
    if !delay.is_zero() {
        std::thread::sleep(delay);
    }
    Ok(v)
}

type RealFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A closed-form function on a box.
#[derive(Clone)]
pub struct FunctionObjective {
    name: String,
    space: SearchSpace,
    func: Arc<RealFn>,
    delay: Duration,
}

impl fmt::Debug for FunctionObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionObjective")
            .field("name", &self.name)
            .field("space", &self.space)
            .field("delay", &self.delay)
            .finish()
    }
}

impl FunctionObjective {
    pub fn new<F>(name: impl Into<String>, space: SearchSpace, func: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if !space.is_continuous() {
            return Err(Error::UnsupportedSpace("closed-form objectives need a continuous box".into()));
        }
        Ok(FunctionObjective { name: name.into(), space, func: Arc::new(func), delay: Duration::ZERO })
    }

    /// Sleeps for `delay` inside every evaluation.
    pub fn with_delay(mut self, delay: Duration) -> Self {
        self.delay = delay;
        self
    }

    pub fn delay(&self) -> Duration {
        self.delay
    }

    pub fn sphere(space: SearchSpace) -> Result<Self> {
        Self::new("sphere", space, sphere)
    }

    pub fn rastrigin(space: SearchSpace) -> Result<Self> {
        Self::new("rastrigin", space, rastrigin)
    }

    pub fn rosenbrock(space: SearchSpace) -> Result<Self> {
        if space.dim() < 2 {
            return Err(Error::InvalidDimension { min: 2, got: space.dim() });
        }
        Self::new("rosenbrock", space, rosenbrock_unchecked)
    }

    pub fn composite(space: SearchSpace, weights: CompositeWeights) -> Result<Self> {
        if space.dim() < 2 {
            return Err(Error::InvalidDimension { min: 2, got: space.dim() });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Config("composite weights must be finite".into()));
        }
        Self::new("composite", space, move |x| composite_unchecked(x, &weights))
    }

    /// Unit-weight composite on `[-5.12, 5.12]^5`, the ablation benchmark.
    pub fn composite5d() -> Self {
        Self::composite(SearchSpace::hypercube(5, -5.12, 5.12).expect("valid box"), UNIT_WEIGHTS)
            .expect("valid composite")
    }

    /// Rosenbrock on `[-5, 10]^5`.
    pub fn rosenbrock5d() -> Self {
        Self::rosenbrock(SearchSpace::hypercube(5, -5.0, 10.0).expect("valid box")).expect("valid rosenbrock")
    }
}

impl Objective for FunctionObjective {
    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn evaluate(&self, position: &Position) -> f64 {
        let x = position.as_real().expect("continuous objective evaluated on a tour");
        let v = (self.func)(x);
        if !self.delay.is_zero() {
            std::thread::sleep(self.delay);
        }
        v
    }

    fn name(&self) -> &str {
        &self.name
    }
}

/// Wraps an objective and counts every call to `evaluate`.
///
/// Used to check that the budget ledger accounts for every true evaluation.
#[derive(Debug)]
pub struct Counted<O> {
    inner: O,
    calls: AtomicU64,
}

impl<O: Objective> Counted<O> {
    pub fn new(inner: O) -> Self {
        Counted { inner, calls: AtomicU64::new(0) }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn reset(&self) {
        self.calls.store(0, Ordering::SeqCst);
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<O: Objective> Objective for Counted<O> {
    fn space(&self) -> &SearchSpace {
        self.inner.space()
    }

    fn evaluate(&self, position: &Position) -> f64 {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.evaluate(position)
    }

    fn name(&self) -> &str {
        self.inner.name()
    }
}
