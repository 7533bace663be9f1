//! Descriptive and inferential statistics for comparing optimizer runs.
//!
//! The t and normal distribution functions come from `statrs`, whose
//! regularized incomplete beta is a continued-fraction evaluation accurate to
//! well below `1e-8` for the degrees of freedom that occur here.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Summary of one sample. `std` uses the `n − 1` denominator and is `0` for
/// a single observation; `cv` is `std / mean` and absent when the mean is 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    pub cv: Option<f64>,
}

fn check_finite(xs: &[f64]) -> Result<()> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::Degenerate("sample contains a non-finite value".into()));
    }
    Ok(())
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance (`n − 1` denominator), two-pass for accuracy.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn summarize(xs: &[f64]) -> Result<SampleSummary> {
    if xs.is_empty() {
        return Err(Error::Degenerate("cannot summarize an empty sample".into()));
    }
    check_finite(xs)?;
    let mean = mean(xs);
    let std = variance(xs).sqrt();
    Ok(SampleSummary {
        n: xs.len(),
        mean,
        std,
        min: xs.iter().copied().fold(f64::INFINITY, f64::min),
        max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        median: median(xs),
        cv: (mean != 0.0).then(|| std / mean),
    })
}

/// Outcome of a Welch two-sample t-test of `a` against `b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub t: f64,
    pub dof: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    /// `(mean_a − mean_b) / s_pooled`.
    pub cohens_d: f64,
}

impl TestResult {
    /// One-sided p-value for the alternative `mean_a < mean_b`.
    pub fn p_less(&self) -> f64 {
        student_t_cdf(self.t, self.dof)
    }

    /// One-sided p-value for the alternative `mean_a > mean_b`.
    pub fn p_greater(&self) -> f64 {
        student_t_cdf(-self.t, self.dof)
    }
}

/// CDF of Student's t distribution with `dof` degrees of freedom.
pub fn student_t_cdf(t: f64, dof: f64) -> f64 {
    StudentsT::new(0.0, 1.0, dof).expect("positive degrees of freedom").cdf(t)
}

fn two_sample(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Degenerate(format!("both samples need at least 2 values, got {} and {}", a.len(), b.len())));
    }
    check_finite(a)?;
    check_finite(b)
}

/// Welch's unequal-variance t-test with a two-sided p-value.
///
/// Two samples without any spread that share a mean give `t = 0, p = 1`;
/// without spread and with different means the test is undefined.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TestResult> {
    two_sample(a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    let (qa, qb) = (variance(a) / na, variance(b) / nb);
    let se2 = qa + qb;
    let cohens_d = cohens_d(a, b).unwrap_or(0.0);
    if se2 == 0.0 {
        if ma == mb {
            return Ok(TestResult { t: 0.0, dof: na + nb - 2.0, p_value: 1.0, cohens_d });
        }
        return Err(Error::Degenerate("both samples have zero variance".into()));
    }
    let t = (ma - mb) / se2.sqrt();
    let dof = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    let p_value = (2.0 * student_t_cdf(-t.abs(), dof)).min(1.0);
    Ok(TestResult { t, dof, p_value, cohens_d })
}

/// Cohen's d with the pooled standard deviation.
pub fn cohens_d(a: &[f64], b: &[f64]) -> Result<f64> {
    two_sample(a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let pooled = (((na - 1.0) * variance(a) + (nb - 1.0) * variance(b)) / (na + nb - 2.0)).sqrt();
    if pooled == 0.0 {
        return Err(Error::Degenerate("pooled standard deviation is zero".into()));
    }
    Ok((mean(a) - mean(b)) / pooled)
}

/// Mann–Whitney U test of `a` against `b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    /// U statistic of `a`: the number of pairs with `a_i > b_j`, ties counting one half.
    pub u: f64,
    /// One-sided p-value for the alternative that `a` tends to be smaller than `b`.
    pub p_less: f64,
}

/// Mann–Whitney U test using the normal approximation with tie and
/// continuity corrections (the large-sample form; use it for `n ≥ 8`).
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Degenerate("Mann-Whitney needs two non-empty samples".into()));
    }
    check_finite(a)?;
    check_finite(b)?;
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let mut all: Vec<(f64, bool)> = a.iter().map(|&x| (x, true)).chain(b.iter().map(|&x| (x, false))).collect();
    all.sort_by(|x, y| x.0.total_cmp(&y.0));

    // mid-ranks, accumulating the tie term Σ(t³ − t)
    let mut rank_sum_a = 0.0;
    let mut ties = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j + 1 < all.len() && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        let t = (j - i + 1) as f64;
        ties += t * t * t - t;
        rank_sum_a += rank * all[i..=j].iter().filter(|p| p.1).count() as f64;
        i = j + 1;
    }
    let u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
    let n = n1 + n2;
    let mu = n1 * n2 / 2.0;
    let sigma = (n1 * n2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)))).sqrt();
    if sigma == 0.0 {
        return Ok(MannWhitney { u, p_less: 1.0 });
    }
    let z = (u - mu + 0.5) / sigma;
    let p_less = Normal::standard().cdf(z);
    Ok(MannWhitney { u, p_less })
}

/// One-sided bootstrap comparison of coefficients of variation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvComparison {
    pub cv_a: f64,
    pub cv_b: f64,
    /// Lower bound of the one-sided bootstrap interval for `cv_a − cv_b`.
    pub lower_bound: f64,
    pub confidence: f64,
}

impl CvComparison {
    /// Whether `cv_a > cv_b` at the requested confidence.
    pub fn a_greater(&self) -> bool {
        self.lower_bound > 0.0
    }
}

/// Percentile bootstrap of `cv(a) − cv(b)`: each sample is resampled
/// independently `resamples` times and the `1 − confidence` quantile of the
/// differences is reported as a one-sided lower bound.
pub fn bootstrap_cv_greater(
    a: &[f64],
    b: &[f64],
    resamples: usize,
    confidence: f64,
    seed: u64,
) -> Result<CvComparison> {
    two_sample(a, b)?;
    if resamples == 0 || !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Config("bootstrap needs resamples > 0 and confidence in (0, 1)".into()));
    }
    let cv = |xs: &[f64]| -> Result<f64> {
        let m = mean(xs);
        if m == 0.0 {
            return Err(Error::Degenerate("coefficient of variation of a zero-mean sample".into()));
        }
        Ok(variance(xs).sqrt() / m)
    };
    let (cv_a, cv_b) = (cv(a)?, cv(b)?);
    let mut rng = RngStream::new(seed);
    let draw = |xs: &[f64], rng: &mut RngStream| -> Vec<f64> {
        (0..xs.len()).map(|_| xs[rng.random_range(0..xs.len())]).collect()
    };
    let mut diffs = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let ra = draw(a, &mut rng);
        let rb = draw(b, &mut rng);
        // a resample with zero mean carries no CV; count it as no evidence
        match (cv(&ra), cv(&rb)) {
            (Ok(x), Ok(y)) => diffs.push(x - y),
            _ => diffs.push(f64::NEG_INFINITY),
        }
    }
    diffs.sort_by(f64::total_cmp);
    let k = (((1.0 - confidence) * resamples as f64).floor() as usize).min(resamples - 1);
    Ok(CvComparison { cv_a, cv_b, lower_bound: diffs[k], confidence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn constant_sample() {
        let s = summarize(&[5.0, 5.0, 5.0]).unwrap();
        assert_eq!((s.mean, s.std, s.cv), (5.0, 0.0, Some(0.0)));
    }

    #[test]
    fn hand_computed_sample() {
        let s = summarize(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        assert_eq!(s.median, 2.5);
        assert!((s.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((s.std - 1.2910).abs() < 1e-4);
    }

    #[test]
    fn scaling_is_homogeneous() {
        let xs = [3.0, -1.0, 4.0, 1.5, 9.0];
        let s = summarize(&xs).unwrap();
        let c = 2.5;
        let t = summarize(&xs.map(|x| c * x)).unwrap();
        for (u, v) in [(s.mean, t.mean), (s.std, t.std), (s.min, t.min), (s.max, t.max), (s.median, t.median)] {
            assert!((c * u - v).abs() < 1e-12);
        }
        assert!((s.cv.unwrap() - t.cv.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn empty_and_zero_mean() {
        assert!(matches!(summarize(&[]), Err(Error::Degenerate(_))));
        assert_eq!(summarize(&[-1.0, 1.0]).unwrap().cv, None);
    }

    #[test]
    fn identical_samples() {
        let a = [1.0, 4.0, 2.0, 8.0];
        let r = welch_t_test(&a, &a).unwrap();
        assert_eq!(r.t, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(cohens_d(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn swapping_negates_t_and_keeps_p() {
        let a = [1.0, 2.5, 3.0, 2.0, 4.0];
        let b = [2.0, 3.5, 5.0, 4.5];
        let ab = welch_t_test(&a, &b).unwrap();
        let ba = welch_t_test(&b, &a).unwrap();
        assert_eq!(ab.t, -ba.t);
        assert_eq!(ab.p_value, ba.p_value);
        assert_eq!(ab.cohens_d, -ba.cohens_d);
        assert!((ab.p_less() - ba.p_greater()).abs() < 1e-15);
    }

    #[test]
    fn shift_and_scale_invariance() {
        let a = [1.0, 2.5, 3.0, 2.0, 4.0];
        let b = [2.0, 3.5, 5.0, 4.5];
        let r = welch_t_test(&a, &b).unwrap();
        let shifted = welch_t_test(&a.map(|x| x + 100.0), &b.map(|x| x + 100.0)).unwrap();
        assert!((r.p_value - shifted.p_value).abs() < 1e-10);
        let d = cohens_d(&a.map(|x| 7.0 * x), &b.map(|x| 7.0 * x)).unwrap();
        assert!((r.cohens_d - d).abs() < 1e-12);
    }

    #[test]
    fn far_apart_normals_are_significant() {
        let mut rng = RngStream::new(2024);
        let a: Vec<f64> = (0..30).map(|_| StandardNormal.sample(&mut rng)).collect();
        let b: Vec<f64> = (0..30).map(|_| 5.0 + Distribution::<f64>::sample(&StandardNormal, &mut rng)).collect();
        assert!(welch_t_test(&a, &b).unwrap().p_value < 1e-10);
    }

    #[test]
    fn unit_shift_gives_unit_d() {
        // zero-mean, unit-sd base sample; shifting by one gives d = 1 exactly
        let base = [-1.5, -0.5, 0.5, 1.5];
        let sd = variance(&base).sqrt();
        let z: Vec<f64> = base.iter().map(|x| x / sd).collect();
        let shifted: Vec<f64> = z.iter().map(|x| x + 1.0).collect();
        assert!((cohens_d(&shifted, &z).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(welch_t_test(&[1.0], &[1.0, 2.0]).is_err());
        assert!(welch_t_test(&[1.0, 1.0], &[2.0, 2.0]).is_err());
        assert!(cohens_d(&[1.0, 1.0], &[2.0, 2.0]).is_err());
    }

    #[test]
    fn mann_whitney_direction() {
        let a: Vec<f64> = (0..20).map(f64::from).collect();
        let b: Vec<f64> = (10..30).map(f64::from).collect();
        assert!(mann_whitney_u(&a, &b).unwrap().p_less < 0.01);
        assert!(mann_whitney_u(&b, &a).unwrap().p_less > 0.99);
        let same = mann_whitney_u(&a, &a).unwrap();
        assert_eq!(same.u, 200.0);
    }

    #[test]
    fn bootstrap_detects_spread() {
        let mut rng = RngStream::new(5);
        let wide: Vec<f64> =
            (0..30).map(|_| 10.0 + 5.0 * Distribution::<f64>::sample(&StandardNormal, &mut rng)).collect();
        let narrow: Vec<f64> =
            (0..30).map(|_| 10.0 + 1.0 * Distribution::<f64>::sample(&StandardNormal, &mut rng)).collect();
        assert!(bootstrap_cv_greater(&wide, &narrow, 2000, 0.9, 1).unwrap().a_greater());
        assert!(!bootstrap_cv_greater(&narrow, &wide, 2000, 0.9, 1).unwrap().a_greater());
    }
}
