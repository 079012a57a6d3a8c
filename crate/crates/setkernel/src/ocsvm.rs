//! One-class SVM over the RKHS of sets.
//!
//! Training data are random subsets of the single training sample, each
//! treated as one point in the set RKHS. The dual problem
//!
//! ```text
//! minimize   (1/2) sum_ij alpha_i alpha_j K(X_i, X_j)
//! subject to 0 <= alpha_i <= 1 / (nu * l),   sum_i alpha_i = 1
//! ```
//!
//! is solved by two-coordinate SMO steps that transfer mass between a maximal
//! violating pair, which preserves the simplex constraint exactly. The bias
//! `rho` is calibrated either from the KKT conditions (median score of margin
//! support vectors) or from the empirical quantile of scores on held-out
//! validation subsets. A test set `Y` is accepted as coming from the training
//! distribution when `sum_i alpha_i K(X_i, Y) - rho >= 0`.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::kernel::{median_in_place, BaseKernelSpec};
use crate::pooled;
use crate::rng::{self, purpose};
use crate::set::SampleSet;
use crate::set_kernel::{set_kernel, SetGram};
use crate::Decision;

/// How the bias `rho` is chosen after the dual solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoCalibration {
    /// Median decision score over margin support vectors
    /// (`0 < alpha_i < 1/(nu l)` with a small slack).
    KktDerived,
    /// Empirical `target_alpha`-quantile of decision scores on
    /// `validation_subsets` held-out subsets drawn from the training sample by
    /// the same subset sampler, so the training-distribution rejection rate
    /// approximates `target_alpha`.
    CrossValidated {
        target_alpha: f64,
        validation_subsets: usize,
    },
}

impl Default for RhoCalibration {
    fn default() -> Self {
        RhoCalibration::CrossValidated {
            target_alpha: 0.05,
            validation_subsets: 200,
        }
    }
}

impl RhoCalibration {
    /// Compact single-token description for config snapshots.
    pub fn describe(&self) -> String {
        match self {
            RhoCalibration::KktDerived => "kkt-derived".to_string(),
            RhoCalibration::CrossValidated {
                target_alpha,
                validation_subsets,
            } => format!("cross-validated:{target_alpha}:{validation_subsets}"),
        }
    }
}

/// How training subsets are generated from the training sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubsetScheme {
    /// `subset_count` independent subsets of exactly `set_size` points, drawn
    /// uniformly without replacement (subsets may overlap each other).
    #[default]
    FixedSize,
    /// Nested prefixes of one random permutation, growing from a single point
    /// to the full sample. `set_size` is ignored; validation subsets (for
    /// cross-validated rho) remain fixed-size.
    Nested,
}

/// Configuration of the one-class SVM trainer and dual solver.
#[derive(Debug, Clone, PartialEq)]
pub struct OcsvmConfig {
    /// Margin-error budget: bounds the fraction of training subsets at the
    /// box constraint and lower-bounds the support-vector fraction.
    pub nu: f64,
    /// Number of training subsets `l`.
    pub subset_count: usize,
    /// Points per subset.
    pub set_size: usize,
    /// KKT violation below which the solver declares convergence.
    pub solver_tolerance: f64,
    /// Iteration budget for the SMO loop.
    pub max_iterations: usize,
    pub rho_calibration: RhoCalibration,
    pub subset_scheme: SubsetScheme,
}

impl OcsvmConfig {
    /// Defaults: tolerance `1e-6`, `100_000 * subset_count` iterations,
    /// cross-validated rho at the 5% quantile over 200 validation subsets,
    /// fixed-size subsets.
    pub fn new(nu: f64, subset_count: usize, set_size: usize) -> Result<Self> {
        let cfg = Self {
            nu,
            subset_count,
            set_size,
            solver_tolerance: 1e-6,
            max_iterations: 100_000 * subset_count.max(1),
            rho_calibration: RhoCalibration::default(),
            subset_scheme: SubsetScheme::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu <= 1.0) || self.nu * (self.subset_count as f64) < 1.0 {
            return Err(Error::InfeasibleNu {
                nu: self.nu,
                subset_count: self.subset_count,
            });
        }
        if self.subset_count == 0 {
            return Err(Error::InvalidParameter("subset_count must be >= 1".into()));
        }
        if self.set_size == 0 {
            return Err(Error::InvalidParameter("set_size must be >= 1".into()));
        }
        if !(self.solver_tolerance > 0.0) {
            return Err(Error::InvalidParameter(
                "solver_tolerance must be positive".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter(
                "max_iterations must be >= 1".into(),
            ));
        }
        if let RhoCalibration::CrossValidated {
            target_alpha,
            validation_subsets,
        } = self.rho_calibration
        {
            if !(target_alpha > 0.0 && target_alpha < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "target_alpha must lie in (0, 1), got {target_alpha}"
                )));
            }
            if validation_subsets == 0 {
                return Err(Error::InvalidParameter(
                    "validation_subsets must be >= 1".into(),
                ));
            }
        }
        Ok(())
    }

    /// Upper box bound `1 / (nu * l)` of the dual.
    pub fn box_bound(&self) -> f64 {
        1.0 / (self.nu * self.subset_count as f64)
    }
}

/// Index subsets per the configured scheme. Draw order is part of the output.
pub(crate) fn sample_index_subsets(
    n: usize,
    config: &OcsvmConfig,
    rng: &mut ChaCha12Rng,
) -> Result<Vec<Vec<usize>>> {
    match config.subset_scheme {
        SubsetScheme::FixedSize => {
            if config.set_size > n {
                return Err(Error::InsufficientData(format!(
                    "cannot draw {}-point subsets from {} points",
                    config.set_size, n
                )));
            }
            Ok((0..config.subset_count)
                .map(|_| rng::indices_without_replacement(rng, n, config.set_size))
                .collect())
        }
        SubsetScheme::Nested => {
            let perm = rng::indices_without_replacement(rng, n, n);
            let l = config.subset_count;
            Ok((1..=l)
                .map(|i| {
                    let size = ((i * n).div_ceil(l)).max(1);
                    perm[..size].to_vec()
                })
                .collect())
        }
    }
}

/// Draws `subset_count` training subsets from `x` (deterministic per seed).
pub fn sample_subsets(
    x: &SampleSet,
    subset_count: usize,
    set_size: usize,
    seed: u64,
) -> Result<Vec<SampleSet>> {
    let config = OcsvmConfig {
        nu: 1.0,
        subset_count,
        set_size,
        solver_tolerance: 1e-6,
        max_iterations: 1,
        rho_calibration: RhoCalibration::KktDerived,
        subset_scheme: SubsetScheme::FixedSize,
    };
    let mut rng = rng::stream(rng::derive_seed(seed, purpose::SUBSETS), 0);
    sample_index_subsets(x.len(), &config, &mut rng)?
        .iter()
        .map(|idx| x.subset(idx))
        .collect()
}

/// Result of the dual solve.
#[derive(Debug, Clone)]
pub struct DualSolution {
    /// Dual coefficients; feasible: in `[0, 1/(nu l)]`, summing to 1.
    pub alphas: Vec<f64>,
    /// `(1/2) alpha^T G alpha` at the final iterate.
    pub objective: f64,
    /// SMO steps taken.
    pub iterations: usize,
    /// Final maximal violating-pair gradient gap.
    pub kkt_violation: f64,
}

fn objective_of(gram: &DMatrix<f64>, alphas: &[f64]) -> f64 {
    let l = alphas.len();
    let mut obj = 0.0;
    for i in 0..l {
        let mut row = 0.0;
        for j in 0..l {
            row += gram[(i, j)] * alphas[j];
        }
        obj += alphas[i] * row;
    }
    0.5 * obj
}

/// Solves the dual by SMO on maximal violating pairs.
///
/// Starts from the uniform feasible point `alpha_i = 1/l`. Each step moves
/// mass from the active coordinate with the largest gradient to the
/// non-saturated coordinate with the smallest, by the analytic minimizer of
/// the one-dimensional restriction clipped to the box; the objective never
/// increases. Convergence is declared when the gradient gap over feasible
/// working pairs drops to `solver_tolerance`.
pub fn solve_dual(gram: &SetGram, config: &OcsvmConfig) -> Result<DualSolution> {
    let l = gram.size();
    if l == 0 {
        return Err(Error::EmptySet);
    }
    if !(config.nu > 0.0 && config.nu <= 1.0) || config.nu * (l as f64) < 1.0 {
        return Err(Error::InfeasibleNu {
            nu: config.nu,
            subset_count: l,
        });
    }
    if !(config.solver_tolerance > 0.0) {
        return Err(Error::InvalidParameter(
            "solver_tolerance must be positive".into(),
        ));
    }
    let g = gram.matrix();
    let c = 1.0 / (config.nu * l as f64);

    let mut alphas = vec![1.0 / l as f64; l];
    // gradient of (1/2) a^T G a is G a
    let mut grad: Vec<f64> = (0..l)
        .map(|i| {
            let mut s = 0.0;
            for j in 0..l {
                s += g[(i, j)] * alphas[j];
            }
            s
        })
        .collect();

    let mut iterations = 0;
    let mut violation;
    loop {
        // maximal violating pair: mass flows from the largest gradient among
        // movable donors to the smallest gradient among receivers with room
        let mut up: Option<usize> = None; // receiver: alpha < C
        let mut down: Option<usize> = None; // donor: alpha > 0
        for i in 0..l {
            if alphas[i] < c && up.is_none_or(|u| grad[i] < grad[u]) {
                up = Some(i);
            }
            if alphas[i] > 0.0 && down.is_none_or(|d| grad[i] > grad[d]) {
                down = Some(i);
            }
        }
        let (i, j) = match (up, down) {
            (Some(i), Some(j)) => (i, j),
            // every coordinate saturated (nu = 1): the unique feasible point
            _ => {
                violation = 0.0;
                break;
            }
        };
        violation = grad[j] - grad[i];
        if violation <= config.solver_tolerance {
            break;
        }
        if iterations >= config.max_iterations {
            let objective = objective_of(g, &alphas);
            return Err(Error::SolverDidNotConverge {
                iterations,
                violation,
                best: Box::new(DualSolution {
                    alphas,
                    objective,
                    iterations,
                    kkt_violation: violation,
                }),
            });
        }

        let room = (c - alphas[i]).min(alphas[j]);
        let curvature = g[(i, i)] + g[(j, j)] - 2.0 * g[(i, j)];
        let step = if curvature > 1e-300 {
            (violation / curvature).min(room)
        } else {
            room
        };
        // snap to the exact bound so the donor/receiver sets stay exact
        if step == room {
            if c - alphas[i] <= alphas[j] {
                alphas[i] = c;
                alphas[j] -= room;
            } else {
                alphas[i] += room;
                alphas[j] = 0.0;
            }
        } else {
            alphas[i] += step;
            alphas[j] -= step;
        }
        for r in 0..l {
            grad[r] += step * (g[(r, i)] - g[(r, j)]);
        }
        iterations += 1;
    }

    Ok(DualSolution {
        objective: objective_of(g, &alphas),
        alphas,
        iterations,
        kkt_violation: violation,
    })
}

/// How the bias of a trained model was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoSource {
    /// Median KKT score over margin support vectors.
    KktMedian,
    /// No margin support vectors existed; alpha-weighted mean of scores.
    KktFallbackWeightedMean,
    /// Quantile of held-out validation scores.
    CrossValidated,
}

impl RhoSource {
    fn as_str(&self) -> &'static str {
        match self {
            RhoSource::KktMedian => "kkt_median",
            RhoSource::KktFallbackWeightedMean => "kkt_fallback_weighted_mean",
            RhoSource::CrossValidated => "cross_validated",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "kkt_median" => Ok(RhoSource::KktMedian),
            "kkt_fallback_weighted_mean" => Ok(RhoSource::KktFallbackWeightedMean),
            "cross_validated" => Ok(RhoSource::CrossValidated),
            other => Err(Error::FileFormat(format!("unknown rho_source {other}"))),
        }
    }
}

const MARGIN_SLACK: f64 = 1e-7;

fn rho_from_kkt(alphas: &[f64], gram: &DMatrix<f64>, box_bound: f64) -> (f64, RhoSource) {
    let l = alphas.len();
    let mut column = vec![0.0; l];
    let mut score = |i: usize| -> f64 {
        for j in 0..l {
            column[j] = gram[(j, i)];
        }
        crate::kernel::weighted_dot(alphas, &column)
    };
    let margin: Vec<usize> = (0..l)
        .filter(|&i| alphas[i] > MARGIN_SLACK && alphas[i] < box_bound - MARGIN_SLACK)
        .collect();
    if margin.is_empty() {
        let weighted = (0..l).map(|i| alphas[i] * score(i)).sum();
        (weighted, RhoSource::KktFallbackWeightedMean)
    } else {
        let mut margin_scores: Vec<f64> = margin.into_iter().map(score).collect();
        (median_in_place(&mut margin_scores), RhoSource::KktMedian)
    }
}

/// 1-based rank of the validation quantile: `max(1, ceil(alpha * count))`.
pub(crate) fn validation_quantile_rank(target_alpha: f64, count: usize) -> usize {
    ((target_alpha * count as f64).ceil() as usize).clamp(1, count)
}

pub(crate) fn validation_index_subsets(
    n: usize,
    set_size: usize,
    count: usize,
    seed: u64,
) -> Vec<Vec<usize>> {
    let mut v_rng = rng::stream(rng::derive_seed(seed, purpose::VALIDATION), 0);
    (0..count)
        .map(|_| rng::indices_without_replacement(&mut v_rng, n, set_size))
        .collect()
}

fn rho_from_scores(mut scores: Vec<f64>, target_alpha: f64) -> f64 {
    let k = validation_quantile_rank(target_alpha, scores.len());
    scores.sort_by(|a, b| a.partial_cmp(b).expect("non-finite validation score"));
    scores[k - 1]
}

/// Calibrates the bias for a solved dual.
///
/// `KktDerived` uses only `alphas` and `gram`; `CrossValidated` additionally
/// scores fresh validation subsets of `x` against the training subsets.
pub fn compute_rho(
    alphas: &[f64],
    gram: &SetGram,
    subsets: &[SampleSet],
    x: &SampleSet,
    config: &OcsvmConfig,
    spec: &BaseKernelSpec,
    seed: u64,
) -> Result<(f64, RhoSource)> {
    match config.rho_calibration {
        RhoCalibration::KktDerived => Ok(rho_from_kkt(alphas, gram.matrix(), config.box_bound())),
        RhoCalibration::CrossValidated {
            target_alpha,
            validation_subsets,
        } => {
            if config.set_size > x.len() {
                return Err(Error::InsufficientData(format!(
                    "cannot draw {}-point validation subsets from {} points",
                    config.set_size,
                    x.len()
                )));
            }
            let val_idx =
                validation_index_subsets(x.len(), config.set_size, validation_subsets, seed);
            let mut scores = Vec::with_capacity(validation_subsets);
            for idx in &val_idx {
                let v = x.subset(idx)?;
                let values = subsets
                    .iter()
                    .map(|tr| set_kernel(tr, &v, spec))
                    .collect::<Result<Vec<f64>>>()?;
                scores.push(crate::kernel::weighted_dot(alphas, &values));
            }
            Ok((
                rho_from_scores(scores, target_alpha),
                RhoSource::CrossValidated,
            ))
        }
    }
}

/// Pooled-index variant of [`compute_rho`], bit-identical to the materialized
/// path (same draws, same kernel values, same accumulation order).
pub(crate) fn compute_rho_pooled(
    alphas: &[f64],
    gram: &SetGram,
    subset_idx: &[Vec<usize>],
    kernel_pool: &DMatrix<f64>,
    n: usize,
    config: &OcsvmConfig,
    seed: u64,
) -> Result<(f64, RhoSource)> {
    match config.rho_calibration {
        RhoCalibration::KktDerived => Ok(rho_from_kkt(alphas, gram.matrix(), config.box_bound())),
        RhoCalibration::CrossValidated {
            target_alpha,
            validation_subsets,
        } => {
            if config.set_size > n {
                return Err(Error::InsufficientData(format!(
                    "cannot draw {}-point validation subsets from {n} points",
                    config.set_size
                )));
            }
            let val_idx = validation_index_subsets(n, config.set_size, validation_subsets, seed);
            let scores: Vec<f64> = val_idx
                .iter()
                .map(|idx| pooled::weighted_score_from_kernel(alphas, subset_idx, kernel_pool, idx))
                .collect();
            Ok((
                rho_from_scores(scores, target_alpha),
                RhoSource::CrossValidated,
            ))
        }
    }
}

/// A single test decision together with the decision-function value.
#[derive(Debug, Clone, Copy)]
pub struct DecideOutcome {
    pub decision: Decision,
    pub score: f64,
}

/// A trained one-class SVM over set kernels.
#[derive(Debug, Clone)]
pub struct OcsvmModel {
    alphas: Vec<f64>,
    rho: f64,
    rho_source: RhoSource,
    training_subsets: Vec<SampleSet>,
    kernel: BaseKernelSpec,
    objective_value: f64,
    nu: f64,
    set_size: usize,
}

impl OcsvmModel {
    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn rho_source(&self) -> RhoSource {
        self.rho_source
    }

    pub fn training_subsets(&self) -> &[SampleSet] {
        &self.training_subsets
    }

    pub fn kernel(&self) -> &BaseKernelSpec {
        &self.kernel
    }

    pub fn objective_value(&self) -> f64 {
        self.objective_value
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn set_size(&self) -> usize {
        self.set_size
    }

    /// Decision function `sign(sum_i alpha_i K(X_i, Y) - rho)`: `Same` when
    /// the score is non-negative (ties count as `Same`).
    pub fn decide(&self, y: &SampleSet) -> Result<DecideOutcome> {
        let values = self
            .training_subsets
            .iter()
            .map(|tr| set_kernel(tr, y, &self.kernel))
            .collect::<Result<Vec<f64>>>()?;
        let score = crate::kernel::weighted_dot(&self.alphas, &values) - self.rho;
        let decision = if score >= 0.0 {
            Decision::Same
        } else {
            Decision::Different
        };
        Ok(DecideOutcome { decision, score })
    }

    /// Versioned plain-text serialization; round-trips bit-exactly.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "setkernel-ocsvm v1")?;
        writeln!(w, "nu {:.16e}", self.nu)?;
        writeln!(w, "subset_count {}", self.training_subsets.len())?;
        writeln!(w, "set_size {}", self.set_size)?;
        writeln!(w, "sigma {:.16e}", self.kernel.sigma())?;
        writeln!(w, "rho {:.16e}", self.rho)?;
        writeln!(w, "rho_source {}", self.rho_source.as_str())?;
        writeln!(w, "objective {:.16e}", self.objective_value)?;
        write!(w, "alphas")?;
        for a in &self.alphas {
            write!(w, " {a:.16e}")?;
        }
        writeln!(w)?;
        for (i, s) in self.training_subsets.iter().enumerate() {
            writeln!(w, "subset {} {} {}", i, s.len(), s.dim())?;
            for p in s.points() {
                let mut first = true;
                for v in p {
                    if !first {
                        write!(w, " ")?;
                    }
                    write!(w, "{v:.16e}")?;
                    first = false;
                }
                writeln!(w)?;
            }
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let mut next_line = || -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::FileFormat("truncated model file".into()))?
                .map_err(Error::from)
        };
        let header = next_line()?;
        if header.trim() != "setkernel-ocsvm v1" {
            return Err(Error::FileFormat(format!(
                "unexpected model header: {header}"
            )));
        }
        fn field<'a>(line: &'a str, key: &str) -> Result<&'a str> {
            let (k, v) = line
                .split_once(' ')
                .ok_or_else(|| Error::FileFormat(format!("bad model line: {line}")))?;
            if k != key {
                return Err(Error::FileFormat(format!("expected key {key}, got {k}")));
            }
            Ok(v.trim())
        }
        let parse_f64 = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::FileFormat(format!("bad number {s}")))
        };
        let parse_usize = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|_| Error::FileFormat(format!("bad integer {s}")))
        };

        let nu = parse_f64(field(&next_line()?, "nu")?)?;
        let subset_count = parse_usize(field(&next_line()?, "subset_count")?)?;
        let set_size = parse_usize(field(&next_line()?, "set_size")?)?;
        let sigma = parse_f64(field(&next_line()?, "sigma")?)?;
        let rho = parse_f64(field(&next_line()?, "rho")?)?;
        let rho_source = RhoSource::parse(field(&next_line()?, "rho_source")?)?;
        let objective_value = parse_f64(field(&next_line()?, "objective")?)?;
        let alphas_line = next_line()?;
        let alphas_str = field(&alphas_line, "alphas")?;
        let alphas = alphas_str
            .split_whitespace()
            .map(parse_f64)
            .collect::<Result<Vec<f64>>>()?;
        if alphas.len() != subset_count {
            return Err(Error::FileFormat(format!(
                "expected {subset_count} alphas, found {}",
                alphas.len()
            )));
        }

        let mut training_subsets = Vec::with_capacity(subset_count);
        for i in 0..subset_count {
            let head = next_line()?;
            let parts: Vec<&str> = head.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "subset" {
                return Err(Error::FileFormat(format!("bad subset header: {head}")));
            }
            if parse_usize(parts[1])? != i {
                return Err(Error::FileFormat(format!("subset index mismatch: {head}")));
            }
            let n_points = parse_usize(parts[2])?;
            let dim = parse_usize(parts[3])?;
            let mut points = Vec::with_capacity(n_points);
            for _ in 0..n_points {
                let row = next_line()?;
                let p = row
                    .split_whitespace()
                    .map(parse_f64)
                    .collect::<Result<Vec<f64>>>()?;
                if p.len() != dim {
                    return Err(Error::FileFormat(format!(
                        "expected {dim} coordinates, found {}",
                        p.len()
                    )));
                }
                points.push(p);
            }
            training_subsets.push(SampleSet::new(points)?);
        }

        let kernel = BaseKernelSpec::gaussian(sigma)?;

        // dual feasibility of the stored multipliers
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(Error::FileFormat(format!("model nu {nu} out of range")));
        }
        let sum: f64 = alphas.iter().sum();
        if (sum - 1.0).abs() > 1e-8 {
            return Err(Error::FileFormat(format!(
                "model alphas sum to {sum}, expected 1"
            )));
        }
        let bound = 1.0 / (nu * subset_count as f64);
        if alphas.iter().any(|&a| a < -1e-9 || a > bound + 1e-9) {
            return Err(Error::FileFormat(
                "model alpha outside the dual box".into(),
            ));
        }

        Ok(Self {
            alphas,
            rho,
            rho_source,
            training_subsets,
            kernel,
            objective_value,
            nu,
            set_size,
        })
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        alphas: Vec<f64>,
        rho: f64,
        rho_source: RhoSource,
        training_subsets: Vec<SampleSet>,
        kernel: BaseKernelSpec,
        objective_value: f64,
        nu: f64,
        set_size: usize,
    ) -> Self {
        Self {
            alphas,
            rho,
            rho_source,
            training_subsets,
            kernel,
            objective_value,
            nu,
            set_size,
        }
    }
}

/// Everything `train` derives before materializing the model; shared with the
/// benchmark harness, which keeps subsets as pool indices instead of copies.
pub(crate) struct TrainedCore {
    pub alphas: Vec<f64>,
    pub rho: f64,
    pub rho_source: RhoSource,
    pub objective: f64,
    pub subset_idx: Vec<Vec<usize>>,
}

pub(crate) fn set_gram_from_kernel_matrix(
    kernel_pool: &DMatrix<f64>,
    subset_idx: &[Vec<usize>],
    spec: &BaseKernelSpec,
) -> SetGram {
    let l = subset_idx.len();
    let mut values = DMatrix::zeros(l, l);
    for i in 0..l {
        for j in i..l {
            let v = pooled::set_kernel_from_kernel(kernel_pool, &subset_idx[i], &subset_idx[j]);
            values[(i, j)] = v;
            values[(j, i)] = v;
        }
    }
    let ids = (0..l).map(|i| i.to_string()).collect();
    SetGram::from_parts(values, *spec, ids)
}

pub(crate) fn train_core(
    points: &[Vec<f64>],
    config: &OcsvmConfig,
    spec: &BaseKernelSpec,
    seed: u64,
) -> Result<TrainedCore> {
    config.validate()?;
    let n = points.len();
    let mut sub_rng = rng::stream(rng::derive_seed(seed, purpose::SUBSETS), 0);
    let subset_idx = sample_index_subsets(n, config, &mut sub_rng)?;
    let d2 = pooled::sqdist_matrix_sym(points);
    let kernel_pool = pooled::kernel_from_sqdist(&d2, spec.sigma());
    let gram = set_gram_from_kernel_matrix(&kernel_pool, &subset_idx, spec);
    let solution = solve_dual(&gram, config)?;
    let (rho, rho_source) = compute_rho_pooled(
        &solution.alphas,
        &gram,
        &subset_idx,
        &kernel_pool,
        n,
        config,
        seed,
    )?;
    Ok(TrainedCore {
        alphas: solution.alphas,
        rho,
        rho_source,
        objective: solution.objective,
        subset_idx,
    })
}

/// Trains the one-class SVM: subset sampling, set-kernel Gram, dual solve,
/// and bias calibration. Deterministic given the seed.
pub fn train(
    x: &SampleSet,
    config: &OcsvmConfig,
    spec: &BaseKernelSpec,
    seed: u64,
) -> Result<OcsvmModel> {
    let core = train_core(x.points(), config, spec, seed)?;
    let training_subsets = core
        .subset_idx
        .iter()
        .map(|idx| x.subset(idx))
        .collect::<Result<Vec<_>>>()?;
    Ok(OcsvmModel::from_parts(
        core.alphas,
        core.rho,
        core.rho_source,
        training_subsets,
        *spec,
        core.objective,
        config.nu,
        config.set_size,
    ))
}
