//! Index-based fast paths over pools of points.
//!
//! Benchmarks and training repeatedly evaluate set kernels between small
//! subsets of a few fixed pools. Precomputing the pool-level squared-distance
//! matrix once and averaging looked-up kernel values reproduces the direct
//! double-sum evaluations bit for bit, because both paths share
//! `squared_distance` / `gauss_from_sqdist` and accumulate in the same
//! row-major order.

use nalgebra::DMatrix;

use crate::kernel::{gauss_from_sqdist, squared_distance};

/// Squared Euclidean distances between all rows of `a` and `b`.
pub(crate) fn sqdist_matrix(a: &[Vec<f64>], b: &[Vec<f64>]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.len(), b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            m[(i, j)] = squared_distance(&a[i], &b[j]);
        }
    }
    m
}

/// Symmetric variant computing only the upper triangle.
pub(crate) fn sqdist_matrix_sym(a: &[Vec<f64>]) -> DMatrix<f64> {
    let n = a.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let d = squared_distance(&a[i], &a[j]);
            m[(i, j)] = d;
            m[(j, i)] = d;
        }
    }
    m
}

/// Kernel matrix obtained by applying the Gaussian to every entry.
pub(crate) fn kernel_from_sqdist(d2: &DMatrix<f64>, sigma: f64) -> DMatrix<f64> {
    d2.map(|d| gauss_from_sqdist(d, sigma))
}

/// Set-kernel value between the subsets `ia` (rows) and `ib` (columns) of the
/// pool pair behind `d2`.
pub(crate) fn set_kernel_from_sqdist(
    d2: &DMatrix<f64>,
    ia: &[usize],
    ib: &[usize],
    sigma: f64,
) -> f64 {
    let mut acc = 0.0;
    for &p in ia {
        for &q in ib {
            acc += gauss_from_sqdist(d2[(p, q)], sigma);
        }
    }
    acc / ((ia.len() * ib.len()) as f64)
}

/// Same averaging over an already-exponentiated kernel matrix.
pub(crate) fn set_kernel_from_kernel(k: &DMatrix<f64>, ia: &[usize], ib: &[usize]) -> f64 {
    let mut acc = 0.0;
    for &p in ia {
        for &q in ib {
            acc += k[(p, q)];
        }
    }
    acc / ((ia.len() * ib.len()) as f64)
}

/// Squared set distance (empirical MMD) from pooled squared distances, with
/// the same negative-cancellation clamp as the direct path.
pub(crate) fn mmd_from_sqdist(
    d2aa: &DMatrix<f64>,
    d2ab: &DMatrix<f64>,
    d2bb: &DMatrix<f64>,
    ia: &[usize],
    ib: &[usize],
    sigma: f64,
) -> f64 {
    let nx = set_kernel_from_sqdist(d2aa, ia, ia, sigma);
    let kxy = set_kernel_from_sqdist(d2ab, ia, ib, sigma);
    let ny = set_kernel_from_sqdist(d2bb, ib, ib, sigma);
    let raw = crate::set_kernel::distance_combine(nx, kxy, ny);
    if raw < 0.0 {
        0.0
    } else {
        raw
    }
}

/// Decision-function sum `sum_i alpha_i K(X_i, Y)` over index subsets, using a
/// precomputed pool-to-pool kernel matrix.
pub(crate) fn weighted_score_from_kernel(
    alphas: &[f64],
    subsets: &[Vec<usize>],
    k: &DMatrix<f64>,
    iy: &[usize],
) -> f64 {
    let values: Vec<f64> = subsets
        .iter()
        .map(|idx| set_kernel_from_kernel(k, idx, iy))
        .collect();
    crate::kernel::weighted_dot(alphas, &values)
}

/// Median of the pairwise distances among the pooled points `ia ++ ib`, where
/// `d2aa`, `d2ab`, `d2bb` hold the squared distances of the underlying pools.
/// Mirrors `median_heuristic` (pairs over the concatenated collection).
pub(crate) fn aggregate_median_from_sqdist(
    d2aa: &DMatrix<f64>,
    d2ab: &DMatrix<f64>,
    d2bb: &DMatrix<f64>,
    ia: &[usize],
    ib: &[usize],
) -> f64 {
    let n = ia.len() + ib.len();
    let mut dists = Vec::with_capacity(n * (n - 1) / 2);
    for (u, &p) in ia.iter().enumerate() {
        for &q in &ia[u + 1..] {
            dists.push(d2aa[(p, q)].sqrt());
        }
    }
    for &p in ia {
        for &q in ib {
            dists.push(d2ab[(p, q)].sqrt());
        }
    }
    for (u, &p) in ib.iter().enumerate() {
        for &q in &ib[u + 1..] {
            dists.push(d2bb[(p, q)].sqrt());
        }
    }
    crate::kernel::median_in_place(&mut dists)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{median_heuristic, BaseKernelSpec};
    use crate::rng::NormalSource;
    use crate::set::SampleSet;
    use crate::set_kernel::{set_distance_sq, set_kernel};

    fn random_pool(seed: u64, n: usize, d: usize) -> Vec<Vec<f64>> {
        let mut src = NormalSource::from_seed(seed, 0);
        (0..n)
            .map(|_| (0..d).map(|_| 1.5 * src.sample()).collect())
            .collect()
    }

    #[test]
    fn pooled_set_kernel_matches_direct_bit_for_bit() {
        let pool_a = random_pool(1, 12, 4);
        let pool_b = random_pool(2, 9, 4);
        let d2 = sqdist_matrix(&pool_a, &pool_b);
        let spec = BaseKernelSpec::gaussian(0.9).unwrap();
        let ia = vec![0, 3, 7, 11];
        let ib = vec![2, 2, 5];
        let xa = SampleSet::new(ia.iter().map(|&i| pool_a[i].clone()).collect()).unwrap();
        let xb = SampleSet::new(ib.iter().map(|&i| pool_b[i].clone()).collect()).unwrap();
        let direct = set_kernel(&xa, &xb, &spec).unwrap();
        let pooled = set_kernel_from_sqdist(&d2, &ia, &ib, 0.9);
        assert_eq!(direct, pooled);
        let k = kernel_from_sqdist(&d2, 0.9);
        assert_eq!(direct, set_kernel_from_kernel(&k, &ia, &ib));
    }

    #[test]
    fn pooled_mmd_matches_set_distance_bit_for_bit() {
        let pool = random_pool(3, 15, 3);
        let d2 = sqdist_matrix_sym(&pool);
        let spec = BaseKernelSpec::gaussian(1.1).unwrap();
        let ia = vec![0, 1, 2, 3, 4];
        let ib = vec![8, 9, 10];
        let xa = SampleSet::new(ia.iter().map(|&i| pool[i].clone()).collect()).unwrap();
        let xb = SampleSet::new(ib.iter().map(|&i| pool[i].clone()).collect()).unwrap();
        assert_eq!(
            set_distance_sq(&xa, &xb, &spec).unwrap(),
            mmd_from_sqdist(&d2, &d2, &d2, &ia, &ib, 1.1)
        );
    }

    #[test]
    fn pooled_aggregate_median_matches_direct() {
        let pool = random_pool(4, 10, 3);
        let d2 = sqdist_matrix_sym(&pool);
        let ia = vec![0, 2, 4];
        let ib = vec![5, 6, 7, 9];
        let mut joined: Vec<Vec<f64>> = ia.iter().map(|&i| pool[i].clone()).collect();
        joined.extend(ib.iter().map(|&i| pool[i].clone()));
        assert_eq!(
            median_heuristic(&joined).unwrap(),
            aggregate_median_from_sqdist(&d2, &d2, &d2, &ia, &ib)
        );
    }
}
