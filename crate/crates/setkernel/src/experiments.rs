//! Benchmark orchestration: end-to-end reruns of the Gaussian and
//! expression-matrix protocols, aggregated into serializable reports.
//!
//! Per repetition the harness draws data, trains the one-class SVM and the
//! MMD threshold, and evaluates fresh test subsets against every method.
//! Repetitions run in parallel on seed-derived streams; aggregation sums
//! integer rejection counts, so reports are byte-identical for a fixed seed
//! regardless of scheduling.

use std::io::Write;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::classical::{union_multivariate_test_indexed, BaseTest};
use crate::data::DatasetSplit;
use crate::error::{Error, Result};
use crate::kernel::{median_heuristic, BaseKernelSpec};
use crate::mmd::order_statistic_index;
use crate::ocsvm::{train_core, OcsvmConfig, RhoCalibration, SubsetScheme};
use crate::pooled;
use crate::rng::{self, purpose};
use crate::set::SampleSet;

/// How the benchmark chooses the MMD kernel bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MmdBandwidth {
    /// One fixed bandwidth for calibration and testing.
    Fixed(f64),
    /// The median heuristic over the training points, computed once.
    TrainMedian,
    /// `scale` times the median pairwise distance over the aggregate of the
    /// two sets under comparison, recomputed per pair (and applied
    /// identically inside the bootstrap calibration).
    AggregateMedian { scale: f64 },
}

impl Default for MmdBandwidth {
    fn default() -> Self {
        MmdBandwidth::AggregateMedian {
            scale: std::f64::consts::SQRT_2,
        }
    }
}

impl MmdBandwidth {
    fn describe(&self) -> String {
        match self {
            MmdBandwidth::Fixed(s) => format!("fixed:{s}"),
            MmdBandwidth::TrainMedian => "train-median".into(),
            MmdBandwidth::AggregateMedian { scale } => format!("aggregate-median:{scale}"),
        }
    }
}

/// One method's aggregated row of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodRecord {
    pub method: String,
    pub dimension: usize,
    pub type_i: f64,
    pub type_ii: f64,
    pub repetitions: usize,
    pub null_trials: usize,
    pub alt_trials: usize,
    pub rejected_null: usize,
    pub accepted_alt: usize,
    pub seed: u64,
    pub config: Vec<(String, String)>,
}

/// A benchmark result: per-method error rates plus everything needed to rerun
/// any single cell.
#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub benchmark: String,
    pub seed: u64,
    pub metadata: Vec<(String, String)>,
    pub records: Vec<MethodRecord>,
}

impl TestReport {
    /// Structured text document, one record block per method/dimension.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "setkernel-report v1")?;
        writeln!(w, "benchmark {}", self.benchmark)?;
        writeln!(w, "seed {}", self.seed)?;
        for (k, v) in &self.metadata {
            writeln!(w, "meta {k} {v}")?;
        }
        for r in &self.records {
            writeln!(w, "record")?;
            writeln!(w, "method {}", r.method)?;
            writeln!(w, "dimension {}", r.dimension)?;
            writeln!(w, "type_i {:.16e}", r.type_i)?;
            writeln!(w, "type_ii {:.16e}", r.type_ii)?;
            writeln!(w, "repetitions {}", r.repetitions)?;
            writeln!(w, "null_trials {}", r.null_trials)?;
            writeln!(w, "alt_trials {}", r.alt_trials)?;
            writeln!(w, "rejected_null {}", r.rejected_null)?;
            writeln!(w, "accepted_alt {}", r.accepted_alt)?;
            writeln!(w, "seed {}", r.seed)?;
            for (k, v) in &r.config {
                writeln!(w, "config {k} {v}")?;
            }
            writeln!(w, "end record")?;
        }
        Ok(())
    }

    /// Flat CSV for plotting; the config snapshot is semicolon-joined into the
    /// last column.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "benchmark,method,dimension,type_i,type_ii,repetitions,null_trials,alt_trials,rejected_null,accepted_alt,seed,config"
        )?;
        for r in &self.records {
            let config = r
                .config
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(";");
            writeln!(
                w,
                "{},{},{},{:.16e},{:.16e},{},{},{},{},{},{},{}",
                self.benchmark,
                r.method,
                r.dimension,
                r.type_i,
                r.type_ii,
                r.repetitions,
                r.null_trials,
                r.alt_trials,
                r.rejected_null,
                r.accepted_alt,
                r.seed,
                config
            )?;
        }
        Ok(())
    }
}

/// Configuration of the synthetic Gaussian benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianBenchmarkConfig {
    pub dims: Vec<usize>,
    pub sigma1: f64,
    pub sigma2: f64,
    pub repetitions: usize,
    /// Points drawn from the training distribution per repetition; the first
    /// `train_size` train the methods, the rest feed null test sets.
    pub train_size: usize,
    pub null_pool_size: usize,
    pub alt_pool_size: usize,
    pub trials_per_side: usize,
    pub set_size: usize,
    pub svm_nu: f64,
    pub svm_subsets: usize,
    pub svm_sigma: f64,
    pub svm_rho: RhoCalibration,
    pub mmd_alpha: f64,
    pub mmd_bootstrap_iters: usize,
    pub mmd_bandwidth: MmdBandwidth,
    pub baseline_alpha: f64,
}

impl Default for GaussianBenchmarkConfig {
    fn default() -> Self {
        Self {
            dims: vec![2, 5, 10, 25, 50],
            sigma1: 1.5,
            sigma2: 3.5,
            repetitions: 20,
            train_size: 250,
            null_pool_size: 1000,
            alt_pool_size: 1000,
            trials_per_side: 1000,
            set_size: 7,
            svm_nu: 0.1,
            svm_subsets: 100,
            svm_sigma: 10.0,
            svm_rho: RhoCalibration::default(),
            mmd_alpha: 0.05,
            mmd_bootstrap_iters: 100,
            mmd_bandwidth: MmdBandwidth::default(),
            baseline_alpha: 0.05,
        }
    }
}

impl GaussianBenchmarkConfig {
    fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::InvalidParameter("no dimensions requested".into()));
        }
        if self.repetitions == 0 || self.trials_per_side == 0 {
            return Err(Error::InvalidParameter(
                "repetitions and trials_per_side must be positive".into(),
            ));
        }
        if self.train_size < 2 * self.set_size {
            return Err(Error::InsufficientData(
                "training pool too small for disjoint bootstrap subsets".into(),
            ));
        }
        if self.null_pool_size < self.set_size || self.alt_pool_size < self.set_size {
            return Err(Error::InsufficientData(
                "test pools must hold at least one subset".into(),
            ));
        }
        self.svm_config().validate()
    }

    fn svm_config(&self) -> OcsvmConfig {
        OcsvmConfig {
            nu: self.svm_nu,
            subset_count: self.svm_subsets,
            set_size: self.set_size,
            solver_tolerance: 1e-6,
            max_iterations: 100_000 * self.svm_subsets.max(1),
            rho_calibration: self.svm_rho,
            subset_scheme: SubsetScheme::FixedSize,
        }
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct SideCounts {
    svm: usize,
    mmd: usize,
    baseline: usize,
}

#[derive(Debug, Default, Clone, Copy)]
struct RepCounts {
    rejected_null: SideCounts,
    rejected_alt: SideCounts,
}

/// Per-trial log used by consistency tests: enough to recompute the recorded
/// MMD statistic from the materialized subsets.
#[derive(Debug, Clone)]
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) struct MmdTrialTrace {
    pub train_idx: Vec<usize>,
    pub test_idx: Vec<usize>,
    pub sigma: f64,
    pub statistic: f64,
    pub null_side: bool,
}

struct MmdCalibrated {
    threshold: f64,
    fixed_sigma: Option<f64>, // None for per-pair aggregate bandwidth
    scale: f64,
}

/// Bootstrap calibration over disjoint subset pairs of the training pool,
/// honoring the configured bandwidth rule.
fn calibrate_mmd(
    train: &SampleSet,
    d2_tt: &DMatrix<f64>,
    set_size: usize,
    alpha: f64,
    iters: usize,
    bandwidth: MmdBandwidth,
    seed: u64,
) -> Result<MmdCalibrated> {
    if train.len() < 2 * set_size {
        return Err(Error::InsufficientData(format!(
            "need {} training points for disjoint bootstrap pairs, got {}",
            2 * set_size,
            train.len()
        )));
    }
    let (fixed_sigma, scale) = match bandwidth {
        MmdBandwidth::Fixed(s) => (Some(s), 1.0),
        MmdBandwidth::TrainMedian => (Some(median_heuristic(train.points())?), 1.0),
        MmdBandwidth::AggregateMedian { scale } => (None, scale),
    };
    let bs_seed = rng::derive_seed(seed, purpose::BOOTSTRAP_BASE);
    let mut stats = Vec::with_capacity(iters);
    for i in 0..iters {
        let mut it_rng = rng::stream(bs_seed, i as u64);
        let idx = rng::indices_without_replacement(&mut it_rng, train.len(), 2 * set_size);
        let (ia, ib) = idx.split_at(set_size);
        let sigma = match fixed_sigma {
            Some(s) => s,
            None => scale * pooled::aggregate_median_from_sqdist(d2_tt, d2_tt, d2_tt, ia, ib),
        };
        stats.push(pooled::mmd_from_sqdist(d2_tt, d2_tt, d2_tt, ia, ib, sigma));
    }
    stats.sort_by(|a, b| a.partial_cmp(b).expect("non-finite MMD statistic"));
    let k = order_statistic_index(alpha, iters);
    Ok(MmdCalibrated {
        threshold: stats[k - 1],
        fixed_sigma,
        scale,
    })
}

/// Shared per-repetition evaluation: SVM decision scores, MMD statistics and
/// the union baseline over one side's trials.
#[allow(clippy::too_many_arguments)]
fn run_trials(
    trials: usize,
    set_size: usize,
    trial_seed: u64,
    // SVM machinery
    alphas: &[f64],
    subset_idx: &[Vec<usize>],
    svm_cross: &DMatrix<f64>,
    rho: f64,
    // MMD machinery (pool squared distances at both bandwidth regimes)
    mmd: &MmdCalibrated,
    d2_tt: &DMatrix<f64>,
    d2_tx: &DMatrix<f64>,
    d2_xx: &DMatrix<f64>,
    // baseline
    train_points: &[Vec<f64>],
    test_points: &[Vec<f64>],
    base_test: BaseTest,
    baseline_alpha: f64,
    null_side: bool,
    mut trace: Option<&mut Vec<MmdTrialTrace>>,
) -> Result<SideCounts> {
    let mut counts = SideCounts::default();
    let mut rng = rng::stream(trial_seed, 0);
    let n_train = train_points.len();
    let n_test = test_points.len();
    for _ in 0..trials {
        let y_idx = rng::indices_without_replacement(&mut rng, n_test, set_size);

        // one-class SVM on set kernels
        let score = pooled::weighted_score_from_kernel(alphas, subset_idx, svm_cross, &y_idx) - rho;
        if score < 0.0 {
            counts.svm += 1;
        }

        // MMD against a fresh training subset
        let a_idx = rng::indices_without_replacement(&mut rng, n_train, set_size);
        let sigma = match mmd.fixed_sigma {
            Some(s) => s,
            None => {
                mmd.scale
                    * pooled::aggregate_median_from_sqdist(d2_tt, d2_tx, d2_xx, &a_idx, &y_idx)
            }
        };
        let stat = pooled::mmd_from_sqdist(d2_tt, d2_tx, d2_xx, &a_idx, &y_idx, sigma);
        if stat > mmd.threshold {
            counts.mmd += 1;
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(MmdTrialTrace {
                train_idx: a_idx.clone(),
                test_idx: y_idx.clone(),
                sigma,
                statistic: stat,
                null_side,
            });
        }

        // classical union baseline against another fresh training subset
        let b_idx = rng::indices_without_replacement(&mut rng, n_train, set_size);
        let decision = union_multivariate_test_indexed(
            train_points,
            &b_idx,
            test_points,
            &y_idx,
            base_test,
            baseline_alpha,
        )?;
        if decision == crate::Decision::Different {
            counts.baseline += 1;
        }
    }
    Ok(counts)
}

fn gaussian_rep(
    cfg: &GaussianBenchmarkConfig,
    dim: usize,
    rep_seed: u64,
    trace: Option<&mut Vec<MmdTrialTrace>>,
) -> Result<RepCounts> {
    let zero = vec![0.0; dim];
    let train = crate::data::sample_gaussian(&zero, cfg.sigma1, cfg.train_size, rep_seed)?;
    let held = crate::data::sample_gaussian(
        &zero,
        cfg.sigma1,
        cfg.null_pool_size,
        rng::derive_seed(rep_seed, 21),
    )?;
    let alt = crate::data::sample_gaussian(
        &zero,
        cfg.sigma2,
        cfg.alt_pool_size,
        rng::derive_seed(rep_seed, 22),
    )?;

    let svm_spec = BaseKernelSpec::gaussian(cfg.svm_sigma)?;
    let core = train_core(train.points(), &cfg.svm_config(), &svm_spec, rep_seed)?;

    let d2_tt = pooled::sqdist_matrix_sym(train.points());
    let d2_th = pooled::sqdist_matrix(train.points(), held.points());
    let d2_hh = pooled::sqdist_matrix_sym(held.points());
    let d2_ta = pooled::sqdist_matrix(train.points(), alt.points());
    let d2_aa = pooled::sqdist_matrix_sym(alt.points());
    let svm_cross_null = pooled::kernel_from_sqdist(&d2_th, cfg.svm_sigma);
    let svm_cross_alt = pooled::kernel_from_sqdist(&d2_ta, cfg.svm_sigma);

    let mmd = calibrate_mmd(
        &train,
        &d2_tt,
        cfg.set_size,
        cfg.mmd_alpha,
        cfg.mmd_bootstrap_iters,
        cfg.mmd_bandwidth,
        rep_seed,
    )?;

    let mut trace = trace;
    let rejected_null = run_trials(
        cfg.trials_per_side,
        cfg.set_size,
        rng::derive_seed(rep_seed, purpose::TRIALS_NULL),
        &core.alphas,
        &core.subset_idx,
        &svm_cross_null,
        core.rho,
        &mmd,
        &d2_tt,
        &d2_th,
        &d2_hh,
        train.points(),
        held.points(),
        BaseTest::FTest,
        cfg.baseline_alpha,
        true,
        trace.as_deref_mut(),
    )?;
    let rejected_alt = run_trials(
        cfg.trials_per_side,
        cfg.set_size,
        rng::derive_seed(rep_seed, purpose::TRIALS_ALT),
        &core.alphas,
        &core.subset_idx,
        &svm_cross_alt,
        core.rho,
        &mmd,
        &d2_tt,
        &d2_ta,
        &d2_aa,
        train.points(),
        alt.points(),
        BaseTest::FTest,
        cfg.baseline_alpha,
        false,
        trace,
    )?;
    Ok(RepCounts {
        rejected_null,
        rejected_alt,
    })
}

/// Exposed for consistency tests: one full repetition with its MMD trial log.
#[cfg(test)]
pub(crate) fn gaussian_rep_traced(
    cfg: &GaussianBenchmarkConfig,
    dim: usize,
    rep_seed: u64,
) -> Result<(Vec<MmdTrialTrace>, SampleSet, SampleSet, SampleSet)> {
    let mut trace = Vec::new();
    gaussian_rep(cfg, dim, rep_seed, Some(&mut trace))?;
    let zero = vec![0.0; dim];
    let train = crate::data::sample_gaussian(&zero, cfg.sigma1, cfg.train_size, rep_seed)?;
    let held = crate::data::sample_gaussian(
        &zero,
        cfg.sigma1,
        cfg.null_pool_size,
        rng::derive_seed(rep_seed, 21),
    )?;
    let alt = crate::data::sample_gaussian(
        &zero,
        cfg.sigma2,
        cfg.alt_pool_size,
        rng::derive_seed(rep_seed, 22),
    )?;
    Ok((trace, train, held, alt))
}

fn rate(count: usize, total: usize) -> f64 {
    count as f64 / total as f64
}

#[allow(clippy::too_many_arguments)]
fn method_record(
    method: &str,
    dimension: usize,
    rejected_null: usize,
    rejected_alt: usize,
    repetitions: usize,
    trials_per_side: usize,
    seed: u64,
    config: Vec<(String, String)>,
) -> MethodRecord {
    let total = repetitions * trials_per_side;
    MethodRecord {
        method: method.to_string(),
        dimension,
        type_i: rate(rejected_null, total),
        type_ii: rate(total - rejected_alt, total),
        repetitions,
        null_trials: total,
        alt_trials: total,
        rejected_null,
        accepted_alt: total - rejected_alt,
        seed,
        config,
    }
}

/// Runs the full synthetic Gaussian protocol and aggregates a report.
pub fn run_gaussian_benchmark(cfg: &GaussianBenchmarkConfig, seed: u64) -> Result<TestReport> {
    cfg.validate()?;
    let mut records = Vec::new();
    for (dim_idx, &dim) in cfg.dims.iter().enumerate() {
        let totals: Result<Vec<RepCounts>> = (0..cfg.repetitions)
            .into_par_iter()
            .map(|rep| {
                let rep_seed = rng::derive_seed(seed, ((dim_idx as u64) << 32) | rep as u64);
                gaussian_rep(cfg, dim, rep_seed, None).map_err(|e| Error::Context {
                    context: format!("gaussian benchmark dim={dim} rep={rep}"),
                    source: Box::new(e),
                })
            })
            .collect();
        let totals = totals?;
        let mut null = SideCounts::default();
        let mut alt = SideCounts::default();
        for t in &totals {
            null.svm += t.rejected_null.svm;
            null.mmd += t.rejected_null.mmd;
            null.baseline += t.rejected_null.baseline;
            alt.svm += t.rejected_alt.svm;
            alt.mmd += t.rejected_alt.mmd;
            alt.baseline += t.rejected_alt.baseline;
        }
        let shared = vec![
            ("sigma1".to_string(), format!("{}", cfg.sigma1)),
            ("sigma2".to_string(), format!("{}", cfg.sigma2)),
            ("train_size".to_string(), format!("{}", cfg.train_size)),
            ("set_size".to_string(), format!("{}", cfg.set_size)),
            (
                "trials_per_side".to_string(),
                format!("{}", cfg.trials_per_side),
            ),
        ];
        let mut svm_cfg = shared.clone();
        svm_cfg.push(("nu".to_string(), format!("{}", cfg.svm_nu)));
        svm_cfg.push(("subset_count".to_string(), format!("{}", cfg.svm_subsets)));
        svm_cfg.push(("svm_sigma".to_string(), format!("{}", cfg.svm_sigma)));
        svm_cfg.push(("rho".to_string(), cfg.svm_rho.describe()));
        let mut mmd_cfg = shared.clone();
        mmd_cfg.push(("alpha".to_string(), format!("{}", cfg.mmd_alpha)));
        mmd_cfg.push((
            "bootstrap_iters".to_string(),
            format!("{}", cfg.mmd_bootstrap_iters),
        ));
        mmd_cfg.push(("bandwidth".to_string(), cfg.mmd_bandwidth.describe()));
        let mut base_cfg = shared;
        base_cfg.push(("alpha".to_string(), format!("{}", cfg.baseline_alpha)));
        base_cfg.push(("rule".to_string(), "per-coordinate union".to_string()));

        records.push(method_record(
            "SVM+SetKernel",
            dim,
            null.svm,
            alt.svm,
            cfg.repetitions,
            cfg.trials_per_side,
            seed,
            svm_cfg,
        ));
        records.push(method_record(
            "MMD",
            dim,
            null.mmd,
            alt.mmd,
            cfg.repetitions,
            cfg.trials_per_side,
            seed,
            mmd_cfg,
        ));
        records.push(method_record(
            "F-Test",
            dim,
            null.baseline,
            alt.baseline,
            cfg.repetitions,
            cfg.trials_per_side,
            seed,
            base_cfg,
        ));
    }
    Ok(TestReport {
        benchmark: "gaussian".to_string(),
        seed,
        metadata: vec![
            (
                "test_set_convention".to_string(),
                format!(
                    "each trial draws one fresh {}-point subset per side from held-out pools; {} trials per side per repetition",
                    cfg.set_size, cfg.trials_per_side
                ),
            ),
        ],
        records,
    })
}

/// Configuration of the expression-matrix protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionBenchmarkConfig {
    pub repetitions: usize,
    pub trials_per_side: usize,
    pub svm_nu: f64,
    pub svm_subsets: usize,
    pub svm_sigma: f64,
    pub svm_rho: RhoCalibration,
    pub mmd_alpha: f64,
    pub mmd_bootstrap_iters: usize,
    pub mmd_bandwidth: MmdBandwidth,
    pub baseline_alpha: f64,
}

impl Default for ExpressionBenchmarkConfig {
    fn default() -> Self {
        Self {
            repetitions: 20,
            trials_per_side: 1000,
            svm_nu: 0.1,
            svm_subsets: 100,
            svm_sigma: 1.0,
            svm_rho: RhoCalibration::default(),
            mmd_alpha: 0.05,
            mmd_bootstrap_iters: 100,
            mmd_bandwidth: MmdBandwidth::default(),
            baseline_alpha: 0.05,
        }
    }
}

fn expression_rep(
    split: &DatasetSplit,
    cfg: &ExpressionBenchmarkConfig,
    rep_seed: u64,
) -> Result<RepCounts> {
    let train = &split.train_positive;
    let leaveout = &split.leaveout_positive;
    let negative = &split.test_negative;
    let set_size = split.set_size;
    if leaveout.len() < set_size || negative.len() < set_size || train.len() < set_size {
        return Err(Error::InsufficientData(format!(
            "set size {set_size} exceeds one of the pools ({}, {}, {})",
            train.len(),
            leaveout.len(),
            negative.len()
        )));
    }

    let svm_spec = BaseKernelSpec::gaussian(cfg.svm_sigma)?;
    let svm_config = OcsvmConfig {
        nu: cfg.svm_nu,
        subset_count: cfg.svm_subsets,
        set_size,
        solver_tolerance: 1e-6,
        max_iterations: 100_000 * cfg.svm_subsets.max(1),
        rho_calibration: cfg.svm_rho,
        subset_scheme: SubsetScheme::FixedSize,
    };
    let core = train_core(train.points(), &svm_config, &svm_spec, rep_seed)?;

    let d2_tt = pooled::sqdist_matrix_sym(train.points());
    let d2_tl = pooled::sqdist_matrix(train.points(), leaveout.points());
    let d2_ll = pooled::sqdist_matrix_sym(leaveout.points());
    let d2_tn = pooled::sqdist_matrix(train.points(), negative.points());
    let d2_nn = pooled::sqdist_matrix_sym(negative.points());
    let svm_cross_null = pooled::kernel_from_sqdist(&d2_tl, cfg.svm_sigma);
    let svm_cross_alt = pooled::kernel_from_sqdist(&d2_tn, cfg.svm_sigma);

    let mmd = calibrate_mmd(
        train,
        &d2_tt,
        set_size,
        cfg.mmd_alpha,
        cfg.mmd_bootstrap_iters,
        cfg.mmd_bandwidth,
        rep_seed,
    )?;

    let rejected_null = run_trials(
        cfg.trials_per_side,
        set_size,
        rng::derive_seed(rep_seed, purpose::TRIALS_NULL),
        &core.alphas,
        &core.subset_idx,
        &svm_cross_null,
        core.rho,
        &mmd,
        &d2_tt,
        &d2_tl,
        &d2_ll,
        train.points(),
        leaveout.points(),
        BaseTest::TTest,
        cfg.baseline_alpha,
        true,
        None,
    )?;
    let rejected_alt = run_trials(
        cfg.trials_per_side,
        set_size,
        rng::derive_seed(rep_seed, purpose::TRIALS_ALT),
        &core.alphas,
        &core.subset_idx,
        &svm_cross_alt,
        core.rho,
        &mmd,
        &d2_tt,
        &d2_tn,
        &d2_nn,
        train.points(),
        negative.points(),
        BaseTest::TTest,
        cfg.baseline_alpha,
        false,
        None,
    )?;
    Ok(RepCounts {
        rejected_null,
        rejected_alt,
    })
}

/// Runs the expression-matrix protocol on a fixed train/leave-out split:
/// type-I from leave-out positive subsets, type-II from negative subsets,
/// fresh subset draws per repetition.
pub fn run_expression_benchmark(
    split: &DatasetSplit,
    cfg: &ExpressionBenchmarkConfig,
    seed: u64,
) -> Result<TestReport> {
    if cfg.repetitions == 0 || cfg.trials_per_side == 0 {
        return Err(Error::InvalidParameter(
            "repetitions and trials_per_side must be positive".into(),
        ));
    }
    let dim = split.train_positive.dim();
    let totals: Result<Vec<RepCounts>> = (0..cfg.repetitions)
        .into_par_iter()
        .map(|rep| {
            let rep_seed = rng::derive_seed(seed, 0xE0000 + rep as u64);
            expression_rep(split, cfg, rep_seed).map_err(|e| Error::Context {
                context: format!("expression benchmark rep={rep}"),
                source: Box::new(e),
            })
        })
        .collect();
    let totals = totals?;
    let mut null = SideCounts::default();
    let mut alt = SideCounts::default();
    for t in &totals {
        null.svm += t.rejected_null.svm;
        null.mmd += t.rejected_null.mmd;
        null.baseline += t.rejected_null.baseline;
        alt.svm += t.rejected_alt.svm;
        alt.mmd += t.rejected_alt.mmd;
        alt.baseline += t.rejected_alt.baseline;
    }

    let shared = vec![
        ("set_size".to_string(), format!("{}", split.set_size)),
        (
            "train_rows".to_string(),
            format!("{}", split.train_positive.len()),
        ),
        (
            "leaveout_rows".to_string(),
            format!("{}", split.leaveout_positive.len()),
        ),
        (
            "negative_rows".to_string(),
            format!("{}", split.test_negative.len()),
        ),
        (
            "trials_per_side".to_string(),
            format!("{}", cfg.trials_per_side),
        ),
    ];
    let mut svm_cfg = shared.clone();
    svm_cfg.push(("nu".to_string(), format!("{}", cfg.svm_nu)));
    svm_cfg.push(("subset_count".to_string(), format!("{}", cfg.svm_subsets)));
    svm_cfg.push(("svm_sigma".to_string(), format!("{}", cfg.svm_sigma)));
    svm_cfg.push(("rho".to_string(), cfg.svm_rho.describe()));
    let mut mmd_cfg = shared.clone();
    mmd_cfg.push(("alpha".to_string(), format!("{}", cfg.mmd_alpha)));
    mmd_cfg.push((
        "bootstrap_iters".to_string(),
        format!("{}", cfg.mmd_bootstrap_iters),
    ));
    mmd_cfg.push(("bandwidth".to_string(), cfg.mmd_bandwidth.describe()));
    let mut base_cfg = shared;
    base_cfg.push(("alpha".to_string(), format!("{}", cfg.baseline_alpha)));
    base_cfg.push(("rule".to_string(), "per-coordinate union".to_string()));

    let records = vec![
        method_record(
            "SVM+SetKernel",
            dim,
            null.svm,
            alt.svm,
            cfg.repetitions,
            cfg.trials_per_side,
            seed,
            svm_cfg,
        ),
        method_record(
            "MMD",
            dim,
            null.mmd,
            alt.mmd,
            cfg.repetitions,
            cfg.trials_per_side,
            seed,
            mmd_cfg,
        ),
        method_record(
            "T-Test",
            dim,
            null.baseline,
            alt.baseline,
            cfg.repetitions,
            cfg.trials_per_side,
            seed,
            base_cfg,
        ),
    ];
    Ok(TestReport {
        benchmark: "expression".to_string(),
        seed,
        metadata: vec![
            (
                "fixture_note".to_string(),
                "synthetic shape-matched fixtures; error rates on the original expression matrices (not vendored) are not reproduced".to_string(),
            ),
            (
                "test_set_convention".to_string(),
                format!(
                    "type-I from {}-point leave-out subsets, type-II from negative subsets; {} trials per side per repetition",
                    split.set_size, cfg.trials_per_side
                ),
            ),
        ],
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set_kernel::set_distance_sq;

    fn tiny_gaussian_cfg() -> GaussianBenchmarkConfig {
        GaussianBenchmarkConfig {
            dims: vec![3],
            repetitions: 2,
            train_size: 40,
            null_pool_size: 60,
            alt_pool_size: 60,
            trials_per_side: 25,
            set_size: 5,
            svm_subsets: 20,
            svm_nu: 0.2,
            svm_rho: RhoCalibration::CrossValidated {
                target_alpha: 0.05,
                validation_subsets: 40,
            },
            ..GaussianBenchmarkConfig::default()
        }
    }

    #[test]
    fn gaussian_benchmark_is_reproducible_and_accounts_trials() {
        let cfg = tiny_gaussian_cfg();
        let a = run_gaussian_benchmark(&cfg, 5).unwrap();
        let b = run_gaussian_benchmark(&cfg, 5).unwrap();
        assert_eq!(a, b);
        let c = run_gaussian_benchmark(&cfg, 6).unwrap();
        assert_ne!(a, c);

        for r in &a.records {
            assert_eq!(r.null_trials, 50);
            assert_eq!(r.alt_trials, 50);
            // accounting: rejected + accepted = trials
            let accepted_null = r.null_trials - r.rejected_null;
            assert_eq!(r.rejected_null + accepted_null, r.null_trials);
            assert!((r.type_i - r.rejected_null as f64 / 50.0).abs() < 1e-15);
            assert!((r.type_ii - r.accepted_alt as f64 / 50.0).abs() < 1e-15);
            assert!(r.type_i >= 0.0 && r.type_i <= 1.0);
            assert!(r.type_ii >= 0.0 && r.type_ii <= 1.0);
        }
        assert_eq!(a.records.len(), 3);
    }

    #[test]
    fn identical_distributions_make_alternatives_behave_like_nulls() {
        let mut cfg = tiny_gaussian_cfg();
        cfg.sigma2 = cfg.sigma1;
        cfg.trials_per_side = 100;
        cfg.repetitions = 3;
        let report = run_gaussian_benchmark(&cfg, 9).unwrap();
        for r in &report.records {
            // alternatives are nulls: type-II should approximate 1 - type-I
            assert!(
                (r.type_ii - (1.0 - r.type_i)).abs() < 0.12,
                "{}: type_i {} type_ii {}",
                r.method,
                r.type_i,
                r.type_ii
            );
        }
    }

    #[test]
    fn harness_mmd_statistics_match_recomputation_from_logged_subsets() {
        let cfg = tiny_gaussian_cfg();
        let (trace, train, held, alt) = gaussian_rep_traced(&cfg, 3, 777).unwrap();
        assert_eq!(trace.len(), 2 * cfg.trials_per_side);
        for t in &trace {
            let a = train.subset(&t.train_idx).unwrap();
            let pool = if t.null_side { &held } else { &alt };
            let y = pool.subset(&t.test_idx).unwrap();
            let spec = BaseKernelSpec::gaussian(t.sigma).unwrap();
            let recomputed = set_distance_sq(&a, &y, &spec).unwrap();
            assert_eq!(t.statistic, recomputed);
        }
    }

    #[test]
    fn report_serialization_has_one_line_per_record_in_csv() {
        let cfg = tiny_gaussian_cfg();
        let report = run_gaussian_benchmark(&cfg, 1).unwrap();
        let mut text = Vec::new();
        report.write_text(&mut text).unwrap();
        let text = String::from_utf8(text).unwrap();
        assert!(text.starts_with("setkernel-report v1"));
        assert_eq!(text.matches("end record\n").count(), report.records.len());

        let mut csv = Vec::new();
        report.write_csv(&mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert_eq!(csv.lines().count(), 1 + report.records.len());
    }

    #[test]
    fn single_repetition_rates_are_multiples_of_trial_reciprocal() {
        let mut cfg = tiny_gaussian_cfg();
        cfg.repetitions = 1;
        cfg.trials_per_side = 20;
        let report = run_gaussian_benchmark(&cfg, 3).unwrap();
        for r in &report.records {
            let scaled_i = r.type_i * 20.0;
            let scaled_ii = r.type_ii * 20.0;
            assert!((scaled_i - scaled_i.round()).abs() < 1e-9);
            assert!((scaled_ii - scaled_ii.round()).abs() < 1e-9);
        }
    }
}
