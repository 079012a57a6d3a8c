//! The baseline kernel two-sample test: empirical MMD statistic and a
//! bootstrap-calibrated rejection threshold.
//!
//! The empirical MMD between two sample sets is exactly the squared distance
//! between their images in the RKHS of sets, so the statistic here shares its
//! code path with [`set_distance_sq`](crate::set_kernel::set_distance_sq).

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::kernel::BaseKernelSpec;
use crate::pooled;
use crate::rng::{self, purpose};
use crate::set::SampleSet;
use crate::set_kernel::set_distance_sq;
use crate::Decision;

/// Empirical MMD (biased V-statistic form, including `i = j` terms):
/// `(1/n^2) sum k(x_i, x_j) - (2/nm) sum k(x_i, y_j) + (1/m^2) sum k(y_i, y_j)`,
/// clamped to zero against floating-point cancellation.
pub fn empirical_mmd(x: &SampleSet, y: &SampleSet, spec: &BaseKernelSpec) -> Result<f64> {
    set_distance_sq(x, y, spec)
}

/// A calibrated rejection threshold for the empirical MMD.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmdThreshold {
    /// Rejection cutoff in statistic units.
    pub value: f64,
    /// Intended type-I error level the calibration targeted.
    pub alpha: f64,
    /// Number of bootstrap iterations behind `value`.
    pub bootstrap_iters: usize,
    /// Seed that reproduces the calibration.
    pub seed: u64,
    /// Size of the subsets compared by the calibrated test.
    pub set_size: usize,
    /// Base-kernel bandwidth used during calibration.
    pub sigma: f64,
}

impl MmdThreshold {
    /// Serializes as a plain-text key-value record.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "setkernel-mmd-threshold v1")?;
        writeln!(w, "value {:.16e}", self.value)?;
        writeln!(w, "alpha {:.16e}", self.alpha)?;
        writeln!(w, "iters {}", self.bootstrap_iters)?;
        writeln!(w, "seed {}", self.seed)?;
        writeln!(w, "set_size {}", self.set_size)?;
        writeln!(w, "sigma {:.16e}", self.sigma)?;
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::FileFormat("empty threshold file".into()))??;
        if header.trim() != "setkernel-mmd-threshold v1" {
            return Err(Error::FileFormat(format!(
                "unexpected threshold header: {header}"
            )));
        }
        let mut value = None;
        let mut alpha = None;
        let mut iters = None;
        let mut seed = None;
        let mut set_size = None;
        let mut sigma = None;
        for line in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, val) = line
                .split_once(' ')
                .ok_or_else(|| Error::FileFormat(format!("bad threshold line: {line}")))?;
            let bad = || Error::FileFormat(format!("bad value for {key}: {val}"));
            match key {
                "value" => value = Some(val.parse::<f64>().map_err(|_| bad())?),
                "alpha" => alpha = Some(val.parse::<f64>().map_err(|_| bad())?),
                "iters" => iters = Some(val.parse::<usize>().map_err(|_| bad())?),
                "seed" => seed = Some(val.parse::<u64>().map_err(|_| bad())?),
                "set_size" => set_size = Some(val.parse::<usize>().map_err(|_| bad())?),
                "sigma" => sigma = Some(val.parse::<f64>().map_err(|_| bad())?),
                other => return Err(Error::FileFormat(format!("unknown threshold key {other}"))),
            }
        }
        let missing = |k: &str| Error::FileFormat(format!("missing threshold key {k}"));
        Ok(Self {
            value: value.ok_or_else(|| missing("value"))?,
            alpha: alpha.ok_or_else(|| missing("alpha"))?,
            bootstrap_iters: iters.ok_or_else(|| missing("iters"))?,
            seed: seed.ok_or_else(|| missing("seed"))?,
            set_size: set_size.ok_or_else(|| missing("set_size"))?,
            sigma: sigma.ok_or_else(|| missing("sigma"))?,
        })
    }
}

/// 1-based index of the `ceil((1 - alpha) * iters)`-th order statistic,
/// clamped into `[1, iters]`.
pub(crate) fn order_statistic_index(alpha: f64, iters: usize) -> usize {
    let k = ((1.0 - alpha) * iters as f64).ceil() as usize;
    k.clamp(1, iters)
}

/// Calibrates a rejection threshold on a single training sample.
///
/// Each of `iters` iterations draws two disjoint subsets of `set_size` points
/// uniformly without replacement from `x` and records their empirical MMD;
/// the threshold is the `ceil((1 - alpha) * iters)`-th order statistic of the
/// recorded values. Iterations draw from independent seed-derived streams, so
/// the result is reproducible and independent of evaluation order.
pub fn bootstrap_threshold(
    x: &SampleSet,
    set_size: usize,
    alpha: f64,
    iters: usize,
    spec: &BaseKernelSpec,
    seed: u64,
) -> Result<MmdThreshold> {
    if set_size == 0 {
        return Err(Error::InvalidParameter("set_size must be positive".into()));
    }
    if x.len() < 2 * set_size {
        return Err(Error::InsufficientData(format!(
            "need at least {} points for two disjoint subsets of {}, got {}",
            2 * set_size,
            set_size,
            x.len()
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if iters == 0 {
        return Err(Error::InvalidParameter(
            "bootstrap_iters must be positive".into(),
        ));
    }

    let d2 = pooled::sqdist_matrix_sym(x.points());
    let bs_seed = rng::derive_seed(seed, purpose::BOOTSTRAP_BASE);
    let mut stats = Vec::with_capacity(iters);
    for i in 0..iters {
        let mut it_rng = rng::stream(bs_seed, i as u64);
        let idx = rng::indices_without_replacement(&mut it_rng, x.len(), 2 * set_size);
        let (ia, ib) = idx.split_at(set_size);
        stats.push(pooled::mmd_from_sqdist(&d2, &d2, &d2, ia, ib, spec.sigma()));
    }
    stats.sort_by(|a, b| a.partial_cmp(b).expect("non-finite MMD statistic"));
    let k = order_statistic_index(alpha, iters);
    Ok(MmdThreshold {
        value: stats[k - 1],
        alpha,
        bootstrap_iters: iters,
        seed,
        set_size,
        sigma: spec.sigma(),
    })
}

/// Outcome of a single two-sample test: the decision plus the statistic that
/// produced it.
#[derive(Debug, Clone, Copy)]
pub struct MmdTestOutcome {
    pub decision: Decision,
    pub statistic: f64,
}

/// Tests whether `y` was drawn from the training distribution.
///
/// Draws a fresh uniform subset of `x_train` of the threshold's `set_size`
/// and declares `Different` exactly when the empirical MMD between that
/// subset and `y` exceeds `threshold.value`.
pub fn mmd_two_sample_test(
    x_train: &SampleSet,
    y: &SampleSet,
    threshold: &MmdThreshold,
    spec: &BaseKernelSpec,
    seed: u64,
) -> Result<MmdTestOutcome> {
    if x_train.len() < threshold.set_size {
        return Err(Error::InsufficientData(format!(
            "training sample has {} points, test needs a subset of {}",
            x_train.len(),
            threshold.set_size
        )));
    }
    let mut sub_rng = rng::stream(rng::derive_seed(seed, purpose::TEST_SUBSET), 0);
    let idx = rng::indices_without_replacement(&mut sub_rng, x_train.len(), threshold.set_size);
    let subset = x_train.subset(&idx)?;
    let statistic = empirical_mmd(&subset, y, spec)?;
    let decision = if statistic > threshold.value {
        Decision::Different
    } else {
        Decision::Same
    };
    Ok(MmdTestOutcome {
        decision,
        statistic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::gaussian_kernel_raw;
    use crate::rng::NormalSource;
    use crate::set_kernel::{set_kernel, set_norm_sq};

    fn spec(sigma: f64) -> BaseKernelSpec {
        BaseKernelSpec::gaussian(sigma).unwrap()
    }

    fn random_set(seed: u64, n: usize, d: usize) -> SampleSet {
        let mut src = NormalSource::from_seed(seed, 0);
        SampleSet::new(
            (0..n)
                .map(|_| (0..d).map(|_| src.sample()).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identical_sets_have_zero_mmd() {
        let x = random_set(1, 6, 3);
        assert!(empirical_mmd(&x, &x, &spec(1.0)).unwrap() <= 1e-12);
    }

    #[test]
    fn two_singletons_closed_form() {
        let x = SampleSet::new(vec![vec![0.0]]).unwrap();
        let y = SampleSet::new(vec![vec![1.0]]).unwrap();
        let m = empirical_mmd(&x, &y, &spec(1.0)).unwrap();
        assert!((m - (2.0 - 2.0 * (-0.5f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn matches_literal_triple_loop_oracle() {
        let x = random_set(2, 4, 3);
        let y = random_set(3, 6, 3);
        let sigma = 0.9;
        let m = empirical_mmd(&x, &y, &spec(sigma)).unwrap();

        // Independent V-statistic oracle: three literal double loops.
        let (n, mm) = (x.len() as f64, y.len() as f64);
        let mut kxx = 0.0;
        for a in x.points() {
            for b in x.points() {
                kxx += gaussian_kernel_raw(a, b, sigma);
            }
        }
        let mut kxy = 0.0;
        for a in x.points() {
            for b in y.points() {
                kxy += gaussian_kernel_raw(a, b, sigma);
            }
        }
        let mut kyy = 0.0;
        for a in y.points() {
            for b in y.points() {
                kyy += gaussian_kernel_raw(a, b, sigma);
            }
        }
        let oracle = kxx / (n * n) - 2.0 * kxy / (n * mm) + kyy / (mm * mm);
        assert!((m - oracle).abs() < 1e-12);
    }

    #[test]
    fn equals_norm_expansion_bit_for_bit() {
        let s = spec(1.1);
        let x = random_set(4, 5, 2);
        let y = random_set(5, 7, 2);
        // identical to the shared three-term combination of the norm pieces
        let expanded = crate::set_kernel::distance_combine(
            set_norm_sq(&x, &s).unwrap(),
            set_kernel(&x, &y, &s).unwrap(),
            set_norm_sq(&y, &s).unwrap(),
        );
        let expanded = if expanded < 0.0 { 0.0 } else { expanded };
        assert_eq!(empirical_mmd(&x, &y, &s).unwrap(), expanded);
        // and the shared path is the set-distance path
        assert_eq!(
            empirical_mmd(&x, &y, &s).unwrap(),
            crate::set_kernel::set_distance_sq(&x, &y, &s).unwrap()
        );
        let forward = empirical_mmd(&x, &y, &s).unwrap();
        let backward = empirical_mmd(&y, &x, &s).unwrap();
        assert!((forward - backward).abs() <= 1e-12);
    }

    #[test]
    fn degenerate_training_sample_gives_zero_threshold() {
        let x = SampleSet::new(vec![vec![2.0, 2.0]; 100]).unwrap();
        let t = bootstrap_threshold(&x, 7, 0.05, 100, &spec(1.0), 9).unwrap();
        assert_eq!(t.value, 0.0);
    }

    #[test]
    fn order_statistic_rule() {
        assert_eq!(order_statistic_index(0.05, 100), 95);
        assert_eq!(order_statistic_index(0.5, 10), 5);
        assert_eq!(order_statistic_index(0.999, 100), 1);
        assert_eq!(order_statistic_index(1e-9, 100), 100);
    }

    #[test]
    fn threshold_is_deterministic_and_monotone_in_alpha() {
        let x = random_set(6, 40, 4);
        let s = spec(1.0);
        let a = bootstrap_threshold(&x, 5, 0.05, 60, &s, 33).unwrap();
        let b = bootstrap_threshold(&x, 5, 0.05, 60, &s, 33).unwrap();
        assert_eq!(a.value, b.value);

        let mut last = f64::INFINITY;
        for alpha in [0.01, 0.05, 0.1, 0.25, 0.5] {
            let t = bootstrap_threshold(&x, 5, alpha, 60, &s, 33).unwrap();
            assert!(t.value <= last);
            last = t.value;
        }
    }

    #[test]
    fn insufficient_data_for_disjoint_subsets() {
        let x = random_set(7, 13, 2);
        assert!(matches!(
            bootstrap_threshold(&x, 7, 0.05, 10, &spec(1.0), 1),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn zero_threshold_rejects_anything_different() {
        let x = random_set(8, 30, 2);
        let y = random_set(9, 5, 2);
        let t = MmdThreshold {
            value: 0.0,
            alpha: 0.05,
            bootstrap_iters: 1,
            seed: 0,
            set_size: 5,
            sigma: 1.0,
        };
        let out = mmd_two_sample_test(&x, &y, &t, &spec(1.0), 17).unwrap();
        assert_eq!(out.decision, Decision::Different);
        assert!(out.statistic > 0.0);
    }

    #[test]
    fn calibration_holds_on_held_out_null_subsets() {
        // Y drawn from the training distribution should be accepted roughly
        // 1 - alpha of the time.
        let x = random_set(10, 80, 3);
        let s = spec(1.0);
        let t = bootstrap_threshold(&x, 6, 0.05, 100, &s, 21).unwrap();
        let mut same = 0;
        let trials = 200;
        for i in 0..trials {
            let y = random_set(5000 + i, 6, 3);
            let out = mmd_two_sample_test(&x, &y, &t, &s, 100 + i).unwrap();
            if out.decision == Decision::Same {
                same += 1;
            }
        }
        // expectation ~190 of 200; far below that indicates mis-calibration
        assert!(same >= 170, "accepted only {same}/{trials} null sets");
    }

    #[test]
    fn null_rejection_rate_is_near_alpha_at_dimension_ten() {
        // 250 training points from N(0, 1.5^2 I) in 10-D, median-heuristic
        // bandwidth, size-7 sets: fresh null pairs should be rejected at a
        // rate close to the calibrated 5%.
        let train = crate::data::sample_gaussian(&[0.0; 10], 1.5, 250, 71).unwrap();
        let sigma = crate::kernel::median_heuristic(train.points()).unwrap();
        let s = spec(sigma);
        let t = bootstrap_threshold(&train, 7, 0.05, 100, &s, 72).unwrap();
        let trials = 1000;
        let mut rejections = 0;
        for i in 0..trials {
            let y = crate::data::sample_gaussian(&[0.0; 10], 1.5, 7, 9000 + i).unwrap();
            let out = mmd_two_sample_test(&train, &y, &t, &s, 500 + i).unwrap();
            if out.decision == Decision::Different {
                rejections += 1;
            }
        }
        let rate = rejections as f64 / trials as f64;
        assert!(rate > 0.02 && rate < 0.10, "null rejection rate {rate}");
    }

    #[test]
    fn threshold_text_round_trip() {
        let t = MmdThreshold {
            value: 0.12345678912345678,
            alpha: 0.05,
            bootstrap_iters: 100,
            seed: 42,
            set_size: 7,
            sigma: 1.5,
        };
        let mut buf = Vec::new();
        t.write_text(&mut buf).unwrap();
        let back = MmdThreshold::read_text(buf.as_slice()).unwrap();
        assert_eq!(t, back);
    }
}
