//! Classical parametric baselines: the two-sample F-test for equal variances,
//! the pooled two-sample T-test for equal means, the regularized incomplete
//! beta function their CDFs need, and a per-coordinate union wrapper for
//! multivariate data.

use crate::error::{Error, Result};
use crate::set::SampleSet;
use crate::Decision;

/// Lanczos approximation of `ln Gamma(x)` for `x > 0` (g = 7, 9 terms).
#[allow(clippy::excessive_precision)] // published coefficient set
fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        let pi = std::f64::consts::PI;
        return pi.ln() - (pi * x).sin().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = 0.99999999999980993;
    for (i, &c) in COEFFS.iter().enumerate() {
        acc += c / (x + (i + 1) as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Continued fraction of the incomplete beta (modified Lentz iteration).
fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    const MAX_ITER: usize = 500;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m_f = m as f64;
        let m2 = 2.0 * m_f;
        // even step
        let aa = m_f * (b - m_f) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        // odd step
        let aa = -(a + m_f) * (qab + m_f) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)`, accurate to about `1e-10`
/// absolute, via the continued fraction with a symmetry switch at
/// `x = a / (a + b)`.
pub fn reg_incomplete_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::DomainError(format!(
            "shape parameters must be positive, got a={a}, b={b}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::DomainError(format!("x must lie in [0, 1], got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let front =
        (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln()).exp();
    if x <= a / (a + b) {
        Ok(front * beta_cf(x, a, b) / a)
    } else {
        Ok(1.0 - front * beta_cf(1.0 - x, b, a) / b)
    }
}

/// CDF of the F distribution with `(d1, d2)` degrees of freedom.
pub fn f_cdf(x: f64, d1: f64, d2: f64) -> Result<f64> {
    if !(d1 > 0.0) || !(d2 > 0.0) {
        return Err(Error::DomainError(
            "degrees of freedom must be positive".into(),
        ));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    reg_incomplete_beta(d1 * x / (d1 * x + d2), 0.5 * d1, 0.5 * d2)
}

/// CDF of Student's t distribution with `df` degrees of freedom.
pub fn t_cdf(t: f64, df: f64) -> Result<f64> {
    if !(df > 0.0) {
        return Err(Error::DomainError(
            "degrees of freedom must be positive".into(),
        ));
    }
    if t == 0.0 {
        return Ok(0.5);
    }
    let half = 0.5 * reg_incomplete_beta(df / (df + t * t), 0.5 * df, 0.5)?;
    Ok(if t > 0.0 { 1.0 - half } else { half })
}

/// Outcome of one univariate test.
#[derive(Debug, Clone, Copy)]
pub struct UnivariateTestResult {
    pub statistic: f64,
    /// Per-sample degrees of freedom `(|a| - 1, |b| - 1)`; the T-test pools
    /// their sum.
    pub degrees_of_freedom: (f64, f64),
    pub p_value: f64,
    pub reject: bool,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(())
}

fn mean_and_var(sample: &[f64]) -> (f64, f64) {
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let var = sample.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

fn check_samples(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "both samples need at least 2 values, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if !a.iter().chain(b.iter()).all(|v| v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    Ok(())
}

/// Two-sample F-test for equal variances: statistic `s_a^2 / s_b^2` with
/// unbiased sample variances, two-sided p-value `2 min(F, 1 - F)` of the
/// F CDF at `(|a|-1, |b|-1)` degrees of freedom.
pub fn f_test_equal_variance(a: &[f64], b: &[f64], alpha: f64) -> Result<UnivariateTestResult> {
    check_alpha(alpha)?;
    check_samples(a, b)?;
    let (_, var_a) = mean_and_var(a);
    let (_, var_b) = mean_and_var(b);
    if var_a <= 0.0 || var_b <= 0.0 {
        return Err(Error::DegenerateVariance);
    }
    let statistic = var_a / var_b;
    let d1 = (a.len() - 1) as f64;
    let d2 = (b.len() - 1) as f64;
    let cdf = f_cdf(statistic, d1, d2)?;
    let p_value = 2.0 * cdf.min(1.0 - cdf);
    Ok(UnivariateTestResult {
        statistic,
        degrees_of_freedom: (d1, d2),
        p_value,
        reject: p_value < alpha,
    })
}

/// Pooled-variance two-sided Student T-test for equal means.
pub fn t_test_equal_mean(a: &[f64], b: &[f64], alpha: f64) -> Result<UnivariateTestResult> {
    check_alpha(alpha)?;
    check_samples(a, b)?;
    let (mean_a, var_a) = mean_and_var(a);
    let (mean_b, var_b) = mean_and_var(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let df = na + nb - 2.0;
    let pooled = ((na - 1.0) * var_a + (nb - 1.0) * var_b) / df;
    if pooled <= 0.0 {
        return Err(Error::DegenerateVariance);
    }
    let statistic = (mean_a - mean_b) / (pooled * (1.0 / na + 1.0 / nb)).sqrt();
    let p_value = 2.0 * (1.0 - t_cdf(statistic.abs(), df)?);
    Ok(UnivariateTestResult {
        statistic,
        degrees_of_freedom: (na - 1.0, nb - 1.0),
        p_value,
        reject: p_value < alpha,
    })
}

/// Which univariate test the union wrapper applies per coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseTest {
    FTest,
    TTest,
}

/// Runs the chosen univariate test independently on each coordinate at level
/// `alpha` and declares `Different` as soon as any coordinate rejects (union
/// rule, no multiplicity correction).
pub fn union_multivariate_test(
    a: &SampleSet,
    b: &SampleSet,
    base: BaseTest,
    alpha: f64,
) -> Result<Decision> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let ia: Vec<usize> = (0..a.len()).collect();
    let ib: Vec<usize> = (0..b.len()).collect();
    union_multivariate_test_indexed(a.points(), &ia, b.points(), &ib, base, alpha)
}

/// Index-subset variant of [`union_multivariate_test`]: compares the selected
/// rows of two pools without materializing them.
pub(crate) fn union_multivariate_test_indexed(
    a_pool: &[Vec<f64>],
    ia: &[usize],
    b_pool: &[Vec<f64>],
    ib: &[usize],
    base: BaseTest,
    alpha: f64,
) -> Result<Decision> {
    check_alpha(alpha)?;
    let dim = a_pool.first().map(|p| p.len()).ok_or(Error::EmptySet)?;
    let mut col_a = vec![0.0; ia.len()];
    let mut col_b = vec![0.0; ib.len()];
    for c in 0..dim {
        for (slot, &row) in ia.iter().enumerate() {
            col_a[slot] = a_pool[row][c];
        }
        for (slot, &row) in ib.iter().enumerate() {
            col_b[slot] = b_pool[row][c];
        }
        let result = match base {
            BaseTest::FTest => f_test_equal_variance(&col_a, &col_b, alpha)?,
            BaseTest::TTest => t_test_equal_mean(&col_a, &col_b, alpha)?,
        };
        if result.reject {
            return Ok(Decision::Different);
        }
    }
    Ok(Decision::Same)
}
