//! Pointwise positive-definite base kernels, bandwidth selection, and Gram
//! matrices between vector collections.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// The supported base kernel families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Gaussian,
}

/// Parameterization of the pointwise kernel `k`.
///
/// For the Gaussian family, `k(x, y) = exp(-||x - y||^2 / (2 sigma^2))` with
/// `sigma` in the same units as the input coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseKernelSpec {
    kind: KernelKind,
    sigma: f64,
}

impl BaseKernelSpec {
    /// A Gaussian kernel with bandwidth `sigma`. Fails unless `sigma` is
    /// positive and finite.
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "kernel bandwidth must be positive and finite, got {sigma}"
            )));
        }
        Ok(Self {
            kind: KernelKind::Gaussian,
            sigma,
        })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Squared Euclidean distance. Shared by every kernel evaluation in the crate
/// so that precomputed-distance paths reproduce direct evaluations bit for
/// bit; compiled exactly once (`inline(never)`) so no call site can be
/// re-optimized into a different rounding sequence.
#[inline(never)]
pub(crate) fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = 0.0;
    for (a, b) in x.iter().zip(y.iter()) {
        let d = a - b;
        acc += d * d;
    }
    acc
}

/// Gaussian kernel value from an already-computed squared distance. Single
/// compiled instantiation, for the same reason as [`squared_distance`].
#[inline(never)]
pub(crate) fn gauss_from_sqdist(sqdist: f64, sigma: f64) -> f64 {
    (-sqdist / (2.0 * sigma * sigma)).exp()
}

pub(crate) fn gaussian_kernel_raw(x: &[f64], y: &[f64], sigma: f64) -> f64 {
    gauss_from_sqdist(squared_distance(x, y), sigma)
}

/// Weighted sum `sum_i alphas[i] * values[i]`, accumulated left to right.
/// Shared by the decision function, validation scoring and KKT scoring so all
/// of them round identically; single compiled instantiation.
#[inline(never)]
pub(crate) fn weighted_dot(alphas: &[f64], values: &[f64]) -> f64 {
    debug_assert_eq!(alphas.len(), values.len());
    let mut acc = 0.0;
    for (a, v) in alphas.iter().zip(values.iter()) {
        acc += a * v;
    }
    acc
}

/// Evaluates the base kernel `k(x, y)`.
///
/// Returns a value in `(0, 1]`, with `k(x, x) = 1` exactly. Symmetric in its
/// arguments bit for bit.
pub fn gaussian_kernel(x: &[f64], y: &[f64], spec: &BaseKernelSpec) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: 1,
            actual: 0,
        });
    }
    if !x.iter().chain(y.iter()).all(|v| v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    Ok(gaussian_kernel_raw(x, y, spec.sigma()))
}

/// Median of a slice, mutating it into sorted order. Even lengths average the
/// two central order statistics.
pub(crate) fn median_in_place(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("non-finite value in median"));
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}

/// The median heuristic: the median of all pairwise Euclidean distances
/// `||x_i - x_j||` over `i < j`, used as the Gaussian bandwidth.
///
/// Needs at least two points; fails with `DegenerateBandwidth` when the median
/// distance is zero (e.g. all points identical).
pub fn median_heuristic(points: &[Vec<f64>]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "median heuristic needs at least 2 points, got {}",
            points.len()
        )));
    }
    let dim = points[0].len();
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: p.len(),
            });
        }
        if !p.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
    }
    let n = points.len();
    let mut dists = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            dists.push(squared_distance(&points[i], &points[j]).sqrt());
        }
    }
    let median = median_in_place(&mut dists);
    if median <= 0.0 {
        return Err(Error::DegenerateBandwidth);
    }
    Ok(median)
}

/// Gram matrix of base-kernel values: entry `(i, j)` is `k(a[i], b[j])`.
///
/// When `a` and `b` are the same collection the result is symmetric with unit
/// diagonal.
pub fn gram_matrix(a: &[Vec<f64>], b: &[Vec<f64>], spec: &BaseKernelSpec) -> Result<DMatrix<f64>> {
    let dim = a
        .first()
        .or_else(|| b.first())
        .map(|p| p.len())
        .unwrap_or(0);
    for p in a.iter().chain(b.iter()) {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: p.len(),
            });
        }
        if !p.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
    }
    let mut m = DMatrix::zeros(a.len(), b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            m[(i, j)] = gaussian_kernel_raw(&a[i], &b[j], spec.sigma());
        }
    }
    Ok(m)
}
