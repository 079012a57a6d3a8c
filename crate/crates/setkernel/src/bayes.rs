//! Misclassification-rate theory for sets, made executable: Monte Carlo
//! estimates of the per-point Bayes error of a known Gaussian pair, and the
//! set-level error `(miss^n + false_positive^n) / 2`, which decays as a power
//! of the set size and never exceeds the per-point error.

use crate::error::{Error, Result};
use crate::rng::{self, purpose, uniform, NormalSource};

/// A pair of isotropic Gaussian class conditionals with equal priors 1/2.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPairProblem {
    pub mean_p: Vec<f64>,
    pub mean_q: Vec<f64>,
    pub sigma_p: f64,
    pub sigma_q: f64,
}

impl GaussianPairProblem {
    pub fn new(mean_p: Vec<f64>, mean_q: Vec<f64>, sigma_p: f64, sigma_q: f64) -> Result<Self> {
        if mean_p.len() != mean_q.len() {
            return Err(Error::DimensionMismatch {
                expected: mean_p.len(),
                actual: mean_q.len(),
            });
        }
        if mean_p.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                actual: 0,
            });
        }
        if !(sigma_p > 0.0 && sigma_q > 0.0) || !sigma_p.is_finite() || !sigma_q.is_finite() {
            return Err(Error::InvalidParameter(
                "class standard deviations must be positive and finite".into(),
            ));
        }
        if !mean_p.iter().chain(mean_q.iter()).all(|v| v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        Ok(Self {
            mean_p,
            mean_q,
            sigma_p,
            sigma_q,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean_p.len()
    }

    /// Log-likelihood ratio `log p_P(x) - log p_Q(x)` up to shared constants.
    fn log_likelihood_ratio(&self, x: &[f64]) -> f64 {
        let d = self.dim() as f64;
        let mut dp = 0.0;
        let mut dq = 0.0;
        for ((xi, mp), mq) in x.iter().zip(&self.mean_p).zip(&self.mean_q) {
            dp += (xi - mp) * (xi - mp);
            dq += (xi - mq) * (xi - mq);
        }
        -d * self.sigma_p.ln() - dp / (2.0 * self.sigma_p * self.sigma_p)
            + d * self.sigma_q.ln()
            + dq / (2.0 * self.sigma_q * self.sigma_q)
    }
}

/// Monte Carlo estimates of the two error components of the Bayes rule:
/// the miss rate (a class-P point sent to Q) and the false positive rate
/// (a class-Q point sent to P), with their binomial standard errors.
#[derive(Debug, Clone, Copy)]
pub struct ErrorComponents {
    pub miss_rate: f64,
    pub false_positive_rate: f64,
    pub miss_std_error: f64,
    pub fp_std_error: f64,
    pub samples: usize,
}

impl ErrorComponents {
    /// Per-point average error `(miss + false_positive) / 2`.
    pub fn bayes_error(&self) -> f64 {
        0.5 * self.miss_rate + 0.5 * self.false_positive_rate
    }

    /// Average error for classifying an entire i.i.d. set of `n` points:
    /// `(miss^n + false_positive^n) / 2`. Equals `bayes_error` at `n = 1` and
    /// is non-increasing in `n`.
    pub fn set_bayes_error(&self, n: u32) -> f64 {
        0.5 * self.miss_rate.powi(n as i32) + 0.5 * self.false_positive_rate.powi(n as i32)
    }

    /// Conservative standard error of the per-point estimate.
    pub fn bayes_std_error(&self) -> f64 {
        0.5 * (self.miss_std_error + self.fp_std_error)
    }
}

/// Estimates the error components by drawing `samples` points from each class
/// and applying the likelihood-ratio rule. Exact density ties (only possible
/// for identical class conditionals) are broken by a fair coin from the same
/// stream. Requires `samples >= 1000`.
pub fn error_components(
    problem: &GaussianPairProblem,
    samples: usize,
    seed: u64,
) -> Result<ErrorComponents> {
    if samples < 1000 {
        return Err(Error::InsufficientData(format!(
            "need at least 1000 Monte Carlo samples, got {samples}"
        )));
    }
    let d = problem.dim();

    let draw_rate = |class_mean: &[f64], class_sigma: f64, stream_id: u64, count_p: bool| {
        let mut normals = NormalSource::from_seed(seed, stream_id);
        let mut coin = rng::stream(rng::derive_seed(seed, stream_id), 1);
        let mut errors = 0usize;
        let mut x = vec![0.0; d];
        for _ in 0..samples {
            for (xi, m) in x.iter_mut().zip(class_mean) {
                *xi = m + class_sigma * normals.sample();
            }
            let llr = problem.log_likelihood_ratio(&x);
            let decide_p = if llr == 0.0 {
                uniform(&mut coin) < 0.5
            } else {
                llr > 0.0
            };
            if decide_p != count_p {
                errors += 1;
            }
        }
        errors as f64 / samples as f64
    };

    let miss_rate = draw_rate(&problem.mean_p, problem.sigma_p, purpose::MC_P, true);
    let false_positive_rate = draw_rate(&problem.mean_q, problem.sigma_q, purpose::MC_Q, false);
    let se = |p: f64| (p * (1.0 - p) / samples as f64).sqrt();
    Ok(ErrorComponents {
        miss_rate,
        false_positive_rate,
        miss_std_error: se(miss_rate),
        fp_std_error: se(false_positive_rate),
        samples,
    })
}

/// Per-point Bayes error of the problem, estimated by Monte Carlo.
pub fn bayes_error(problem: &GaussianPairProblem, samples: usize, seed: u64) -> Result<f64> {
    Ok(error_components(problem, samples, seed)?.bayes_error())
}

/// Set-level Bayes error for sets of `n` i.i.d. points.
pub fn set_bayes_error(
    problem: &GaussianPairProblem,
    n: u32,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    Ok(error_components(problem, samples, seed)?.set_bayes_error(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn normal_cdf(z: f64) -> f64 {
        // complementary error function via Abramowitz-Stegun 7.1.26
        let x = z / std::f64::consts::SQRT_2;
        let t = 1.0 / (1.0 + 0.3275911 * x.abs());
        let poly = t
            * (0.254829592
                + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
        let erf = 1.0 - poly * (-x * x).exp();
        let erf = if x >= 0.0 { erf } else { -erf };
        0.5 * (1.0 + erf)
    }

    #[test]
    fn identical_classes_are_indistinguishable() {
        let p = GaussianPairProblem::new(vec![0.0; 3], vec![0.0; 3], 1.0, 1.0).unwrap();
        let c = error_components(&p, 20_000, 1).unwrap();
        assert!((c.bayes_error() - 0.5).abs() < 0.02);
        // fair-coin tie-break keeps each component near 1/2 as well
        assert!((c.miss_rate - 0.5).abs() < 0.02);
        assert!((c.false_positive_rate - 0.5).abs() < 0.02);
    }

    #[test]
    fn one_dimensional_equal_variance_matches_normal_cdf() {
        // means 0 and 2, sigma 1: threshold at the midpoint, error Phi(-1)
        let p = GaussianPairProblem::new(vec![0.0], vec![2.0], 1.0, 1.0).unwrap();
        let c = error_components(&p, 400_000, 2).unwrap();
        let expected = normal_cdf(-1.0); // ~0.15866
        assert!((c.miss_rate - expected).abs() < 0.004, "{}", c.miss_rate);
        assert!(
            (c.false_positive_rate - expected).abs() < 0.004,
            "{}",
            c.false_positive_rate
        );
        assert!((c.bayes_error() - 0.15866).abs() < 0.004);

        // n = 2 closed form
        let sb2 = c.set_bayes_error(2);
        assert!((sb2 - 0.025174).abs() < 0.002, "{sb2}");
    }

    #[test]
    fn set_error_identities_and_decay() {
        let p = GaussianPairProblem::new(vec![0.0; 4], vec![0.0; 4], 1.5, 3.5).unwrap();
        let c = error_components(&p, 50_000, 3).unwrap();
        assert_eq!(c.set_bayes_error(1), c.bayes_error());
        let mut prev = c.bayes_error();
        for n in 2..=20 {
            let v = c.set_bayes_error(n);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
        if c.miss_rate < 0.35 && c.false_positive_rate < 0.35 {
            assert!(c.set_bayes_error(20) < 1e-10);
        }
        assert!(c.bayes_error() <= 0.5 + 1e-12);
    }

    #[test]
    fn geometric_decay_rate_matches_dominant_component() {
        let p = GaussianPairProblem::new(vec![0.0; 2], vec![1.0, -0.5], 1.0, 2.0).unwrap();
        let c = error_components(&p, 100_000, 4).unwrap();
        let dominant = c.miss_rate.max(c.false_positive_rate);
        if (c.miss_rate - c.false_positive_rate).abs() > 0.01 {
            let rate = c.set_bayes_error(20).ln() - c.set_bayes_error(21).ln();
            assert!((rate - (-dominant.ln())).abs() < 1e-3, "rate {rate}");
        }
    }

    #[test]
    fn matches_independent_monte_carlo_oracle() {
        let p = GaussianPairProblem::new(vec![0.0; 10], vec![0.0; 10], 1.5, 3.5).unwrap();
        let a = error_components(&p, 200_000, 5).unwrap();
        let b = error_components(&p, 1_000_000, 999).unwrap(); // independent stream
        let tol = 3.0 * (a.miss_std_error + b.miss_std_error);
        assert!((a.miss_rate - b.miss_rate).abs() <= tol);
        let tol = 3.0 * (a.fp_std_error + b.fp_std_error);
        assert!((a.false_positive_rate - b.false_positive_rate).abs() <= tol);
    }

    #[test]
    fn validation_errors() {
        assert!(GaussianPairProblem::new(vec![0.0], vec![0.0, 1.0], 1.0, 1.0).is_err());
        assert!(GaussianPairProblem::new(vec![0.0], vec![0.0], 0.0, 1.0).is_err());
        let p = GaussianPairProblem::new(vec![0.0], vec![1.0], 1.0, 1.0).unwrap();
        assert!(matches!(
            error_components(&p, 10, 0),
            Err(Error::InsufficientData(_))
        ));
    }
}
