//! Command-line surface for set-kernel two-sample testing.
//!
//! Subcommands: `simulate` (write synthetic Gaussian CSVs), `train` (fit and
//! save a one-class SVM over set kernels), `test` (run one two-sample test,
//! exit 0 on Same / 1 on Different / >= 2 on error), `benchmark` (full
//! Gaussian or expression protocol into report files) and `fixture`
//! (regenerate the shipped expression fixtures).
//!
//! Every subcommand is deterministic given `--seed`; without it a seed is
//! drawn and printed. An optional `key=value` config file supplies defaults;
//! flags override it. Output files are never overwritten without `--force`.

// NaN-robust validations keep the negated-comparison form
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::ConfigFile;
use setkernel::classical::{
    f_test_equal_variance, t_test_equal_mean, union_multivariate_test, BaseTest,
};
use setkernel::data::{load_matrix_csv, split_dataset, write_matrix_csv, Orientation};
use setkernel::experiments::{
    run_expression_benchmark, run_gaussian_benchmark, ExpressionBenchmarkConfig,
    GaussianBenchmarkConfig, MmdBandwidth, TestReport,
};
use setkernel::fixtures::{self, fixture_spec, FIXTURES};
use setkernel::mmd::{bootstrap_threshold, mmd_two_sample_test, MmdThreshold};
use setkernel::ocsvm::{train, OcsvmConfig, OcsvmModel, RhoCalibration, SubsetScheme};
use setkernel::rng::derive_seed;
use setkernel::{median_heuristic, BaseKernelSpec, Decision, SampleSet};

struct Failure {
    message: String,
    code: u8,
}

fn fail(message: impl Into<String>) -> Failure {
    Failure {
        message: message.into(),
        code: 2,
    }
}

type CliResult = Result<u8, Failure>;

impl From<setkernel::Error> for Failure {
    fn from(e: setkernel::Error) -> Self {
        fail(e.to_string())
    }
}

impl From<String> for Failure {
    fn from(message: String) -> Self {
        fail(message)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        fail(e.to_string())
    }
}

/// Four significant digits for console output; files keep full precision.
fn sig4(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    if (-3..4).contains(&mag) {
        let dec = (3 - mag).max(0) as usize;
        format!("{v:.dec$}")
    } else {
        format!("{v:.3e}")
    }
}

fn resolve_seed(flag: Option<u64>, cfg: &ConfigFile) -> Result<u64, String> {
    let explicit = cfg.resolve_opt(flag, "seed")?;
    Ok(explicit.unwrap_or_else(rand::random))
}

fn guarded_writer(path: &Path, force: bool) -> Result<BufWriter<File>, Failure> {
    if path.exists() && !force {
        return Err(fail(format!(
            "refusing to overwrite {} (pass --force)",
            path.display()
        )));
    }
    Ok(BufWriter::new(File::create(path).map_err(|e| {
        fail(format!("cannot create {}: {e}", path.display()))
    })?))
}

fn load_config(path: &Option<PathBuf>) -> Result<ConfigFile, Failure> {
    match path {
        Some(p) => ConfigFile::load(p).map_err(fail),
        None => Ok(ConfigFile::empty()),
    }
}

fn load_samples(path: &Path, orientation: Orientation) -> Result<SampleSet, Failure> {
    let matrix =
        load_matrix_csv(path, orientation).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    SampleSet::new(matrix.rows).map_err(|e| fail(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrientationArg {
    Rows,
    Columns,
}

impl From<OrientationArg> for Orientation {
    fn from(o: OrientationArg) -> Self {
        match o {
            OrientationArg::Rows => Orientation::SamplesAsRows,
            OrientationArg::Columns => Orientation::SamplesAsColumns,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RhoMode {
    Cv,
    Kkt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Fixed,
    Nested,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    SvmSet,
    Mmd,
    FTest,
    TTest,
}

fn parse_bandwidth(s: &str) -> Result<MmdBandwidth, String> {
    if s == "aggregate" {
        return Ok(MmdBandwidth::AggregateMedian {
            scale: std::f64::consts::SQRT_2,
        });
    }
    if let Some(rest) = s.strip_prefix("aggregate:") {
        let scale: f64 = rest
            .parse()
            .map_err(|_| format!("bad aggregate scale {rest}"))?;
        if !(scale > 0.0) {
            return Err("aggregate scale must be positive".into());
        }
        return Ok(MmdBandwidth::AggregateMedian { scale });
    }
    if s == "train-median" {
        return Ok(MmdBandwidth::TrainMedian);
    }
    if let Some(rest) = s.strip_prefix("fixed:") {
        let sigma: f64 = rest.parse().map_err(|_| format!("bad bandwidth {rest}"))?;
        if !(sigma > 0.0) {
            return Err("fixed bandwidth must be positive".into());
        }
        return Ok(MmdBandwidth::Fixed(sigma));
    }
    Err(format!(
        "unknown bandwidth {s:?}; expected aggregate[:scale], train-median or fixed:sigma"
    ))
}

#[derive(Parser)]
#[command(
    name = "setkernel",
    version,
    about = "Two-sample hypothesis testing with set kernels, MMD and classical baselines",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write synthetic Gaussian train/test CSVs
    Simulate(SimulateArgs),
    /// Train a one-class SVM over set kernels and save the model
    Train(TrainArgs),
    /// Run one two-sample test (exit 0 = Same, 1 = Different)
    Test(TestArgs),
    /// Run a full benchmark protocol into report files
    #[command(subcommand)]
    Benchmark(BenchmarkCommand),
    /// Regenerate the shipped expression fixtures
    Fixture(FixtureArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Output directory (must exist)
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    sigma1: Option<f64>,
    #[arg(long)]
    sigma2: Option<f64>,
    /// Rows drawn from the training distribution P
    #[arg(long)]
    n: Option<usize>,
    /// Rows drawn from the alternative distribution Q
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    force: bool,
    /// key=value config file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    /// Training sample CSV (one point per row by default)
    #[arg(long)]
    train: PathBuf,
    /// Where to write the model
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "rows")]
    orientation: OrientationArg,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    subsets: Option<usize>,
    #[arg(long)]
    set_size: Option<usize>,
    /// Fixed kernel bandwidth; defaults to the median heuristic
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, value_enum)]
    rho: Option<RhoMode>,
    #[arg(long)]
    target_alpha: Option<f64>,
    #[arg(long)]
    validation_subsets: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long, value_enum)]
    subset_scheme: Option<SchemeArg>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    force: bool,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TestArgs {
    /// Training sample CSV
    #[arg(long)]
    train: PathBuf,
    /// Test set CSV (the whole file is one set)
    #[arg(long)]
    test: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "rows")]
    orientation: OrientationArg,
    /// Pre-trained model file (svm-set only; otherwise trains on --train)
    #[arg(long)]
    model: Option<PathBuf>,
    /// Fixed MMD rejection threshold, bypassing the bootstrap
    #[arg(long)]
    threshold: Option<f64>,
    /// Load a serialized MMD threshold record
    #[arg(long)]
    threshold_file: Option<PathBuf>,
    /// Save the calibrated MMD threshold record
    #[arg(long)]
    threshold_out: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    subsets: Option<usize>,
    #[arg(long)]
    set_size: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, value_enum)]
    rho: Option<RhoMode>,
    #[arg(long)]
    target_alpha: Option<f64>,
    #[arg(long)]
    validation_subsets: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    force: bool,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BenchmarkCommand {
    /// Synthetic Gaussian protocol across dimensions
    Gaussian(BenchGaussianArgs),
    /// Expression-matrix protocol on a fixture or user CSVs
    Expression(BenchExpressionArgs),
}

#[derive(Args)]
struct BenchGaussianArgs {
    /// Output prefix; writes <prefix>.txt and <prefix>.csv
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated dimensions
    #[arg(long)]
    dims: Option<String>,
    #[arg(long)]
    sigma1: Option<f64>,
    #[arg(long)]
    sigma2: Option<f64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    set_size: Option<usize>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    subsets: Option<usize>,
    #[arg(long)]
    svm_sigma: Option<f64>,
    /// aggregate[:scale] | train-median | fixed:sigma
    #[arg(long)]
    mmd_bandwidth: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Full-scale protocol: 100 repetitions over all five dimensions
    #[arg(long)]
    full_scale: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    force: bool,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BenchExpressionArgs {
    /// Output prefix; writes <prefix>.txt and <prefix>.csv
    #[arg(long)]
    out: PathBuf,
    /// One of the shipped fixture names
    #[arg(long)]
    fixture: Option<String>,
    /// Positive-class CSV (alternative to --fixture)
    #[arg(long)]
    positive: Option<PathBuf>,
    /// Negative-class CSV (alternative to --fixture)
    #[arg(long)]
    negative: Option<PathBuf>,
    #[arg(long)]
    train_count: Option<usize>,
    #[arg(long)]
    leaveout_count: Option<usize>,
    #[arg(long)]
    set_size: Option<usize>,
    #[arg(long, value_enum, default_value = "rows")]
    orientation: OrientationArg,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    subsets: Option<usize>,
    #[arg(long)]
    svm_sigma: Option<f64>,
    #[arg(long)]
    mmd_bandwidth: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    force: bool,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct FixtureArgs {
    /// Fixture name; omit with --manifest to cover all of them
    #[arg(long)]
    name: Option<String>,
    /// Directory to write <name>_positive.csv and <name>_negative.csv
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the manifest (shapes and checksums) to stdout
    #[arg(long)]
    manifest: bool,
    #[arg(long)]
    force: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Train(args) => cmd_train(args),
        Command::Test(args) => cmd_test(args),
        Command::Benchmark(BenchmarkCommand::Gaussian(args)) => cmd_benchmark_gaussian(args),
        Command::Benchmark(BenchmarkCommand::Expression(args)) => cmd_benchmark_expression(args),
        Command::Fixture(args) => cmd_fixture(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn cmd_simulate(args: SimulateArgs) -> CliResult {
    let cfg = load_config(&args.config)?;
    let dim = cfg.resolve(args.dim, "dim", 10usize)?;
    let sigma1 = cfg.resolve(args.sigma1, "sigma1", 1.5)?;
    let sigma2 = cfg.resolve(args.sigma2, "sigma2", 3.5)?;
    let n = cfg.resolve(args.n, "n", 1250usize)?;
    let m = cfg.resolve(args.m, "m", 1000usize)?;
    let seed = resolve_seed(args.seed, &cfg)?;
    cfg.finish()?;

    if !args.out.is_dir() {
        return Err(fail(format!(
            "output directory {} does not exist",
            args.out.display()
        )));
    }
    let mean = vec![0.0; dim];
    let p = setkernel::data::sample_gaussian(&mean, sigma1, n, derive_seed(seed, 1))?;
    let q = setkernel::data::sample_gaussian(&mean, sigma2, m, derive_seed(seed, 2))?;
    let p_path = args.out.join("train_p.csv");
    let q_path = args.out.join("test_q.csv");
    if (p_path.exists() || q_path.exists()) && !args.force {
        return Err(fail(format!(
            "refusing to overwrite files in {} (pass --force)",
            args.out.display()
        )));
    }
    write_matrix_csv(&p_path, p.points(), true)?;
    write_matrix_csv(&q_path, q.points(), true)?;

    println!("seed {seed}");
    println!("config dim {dim}");
    println!("config sigma1 {}", sig4(sigma1));
    println!("config sigma2 {}", sig4(sigma2));
    println!("config n {n}");
    println!("config m {m}");
    println!("wrote {}", p_path.display());
    println!("wrote {}", q_path.display());
    Ok(0)
}

struct SvmFlags {
    nu: f64,
    subsets: usize,
    set_size: usize,
    sigma: Option<f64>,
    rho: RhoCalibration,
    tolerance: f64,
    max_iterations: Option<usize>,
    scheme: SubsetScheme,
}

#[allow(clippy::too_many_arguments)]
fn resolve_svm_flags(
    cfg: &ConfigFile,
    nu: Option<f64>,
    subsets: Option<usize>,
    set_size: Option<usize>,
    sigma: Option<f64>,
    rho: Option<RhoMode>,
    target_alpha: Option<f64>,
    validation_subsets: Option<usize>,
    tolerance: Option<f64>,
    max_iterations: Option<usize>,
    scheme: Option<SchemeArg>,
) -> Result<SvmFlags, Failure> {
    let nu = cfg.resolve(nu, "nu", 0.1)?;
    let subsets = cfg.resolve(subsets, "subsets", 100usize)?;
    let set_size = cfg.resolve(set_size, "set-size", 7usize)?;
    let sigma = cfg.resolve_opt(sigma, "sigma")?;
    let rho_mode = cfg
        .resolve_opt(rho.map(|r| format!("{r:?}").to_lowercase()), "rho")?
        .unwrap_or_else(|| "cv".to_string());
    let target_alpha = cfg.resolve(target_alpha, "target-alpha", 0.05)?;
    let validation_subsets = cfg.resolve(validation_subsets, "validation-subsets", 200usize)?;
    let rho = match rho_mode.as_str() {
        "cv" => RhoCalibration::CrossValidated {
            target_alpha,
            validation_subsets,
        },
        "kkt" => RhoCalibration::KktDerived,
        other => return Err(fail(format!("unknown rho mode {other}"))),
    };
    let tolerance = cfg.resolve(tolerance, "tolerance", 1e-6)?;
    let max_iterations = cfg.resolve_opt(max_iterations, "max-iterations")?;
    let scheme_name = cfg
        .resolve_opt(
            scheme.map(|s| format!("{s:?}").to_lowercase()),
            "subset-scheme",
        )?
        .unwrap_or_else(|| "fixed".to_string());
    let scheme = match scheme_name.as_str() {
        "fixed" => SubsetScheme::FixedSize,
        "nested" => SubsetScheme::Nested,
        other => return Err(fail(format!("unknown subset scheme {other}"))),
    };
    Ok(SvmFlags {
        nu,
        subsets,
        set_size,
        sigma,
        rho,
        tolerance,
        max_iterations,
        scheme,
    })
}

fn svm_config(flags: &SvmFlags) -> OcsvmConfig {
    OcsvmConfig {
        nu: flags.nu,
        subset_count: flags.subsets,
        set_size: flags.set_size,
        solver_tolerance: flags.tolerance,
        max_iterations: flags
            .max_iterations
            .unwrap_or(100_000 * flags.subsets.max(1)),
        rho_calibration: flags.rho,
        subset_scheme: flags.scheme,
    }
}

fn echo_svm(flags: &SvmFlags, sigma: f64, sigma_source: &str, seed: u64) {
    println!("seed {seed}");
    println!("config nu {}", sig4(flags.nu));
    println!("config subsets {}", flags.subsets);
    println!("config set_size {}", flags.set_size);
    println!("config sigma {} ({sigma_source})", sig4(sigma));
    println!("config rho {}", flags.rho.describe());
    println!("config tolerance {:e}", flags.tolerance);
}

fn cmd_train(args: TrainArgs) -> CliResult {
    let cfg = load_config(&args.config)?;
    let flags = resolve_svm_flags(
        &cfg,
        args.nu,
        args.subsets,
        args.set_size,
        args.sigma,
        args.rho,
        args.target_alpha,
        args.validation_subsets,
        args.tolerance,
        args.max_iterations,
        args.subset_scheme,
    )?;
    let seed = resolve_seed(args.seed, &cfg)?;
    cfg.finish()?;

    let train_set = load_samples(&args.train, args.orientation.into())?;
    let (sigma, sigma_source) = match flags.sigma {
        Some(s) => (s, "fixed"),
        None => (median_heuristic(train_set.points())?, "median heuristic"),
    };
    let spec = BaseKernelSpec::gaussian(sigma)?;
    let model = train(&train_set, &svm_config(&flags), &spec, seed)?;

    let mut w = guarded_writer(&args.out, args.force)?;
    model.write_text(&mut w)?;
    w.flush()?;

    echo_svm(&flags, sigma, sigma_source, seed);
    println!("rho {} ({:?})", sig4(model.rho()), model.rho_source());
    println!("objective {}", sig4(model.objective_value()));
    println!("wrote {}", args.out.display());
    Ok(0)
}

fn decision_exit(decision: Decision) -> u8 {
    match decision {
        Decision::Same => 0,
        Decision::Different => 1,
    }
}

fn cmd_test(args: TestArgs) -> CliResult {
    let cfg = load_config(&args.config)?;
    let orientation: Orientation = args.orientation.into();
    let train_set = load_samples(&args.train, orientation)?;
    let test_set = load_samples(&args.test, orientation)?;

    match args.method {
        MethodArg::SvmSet => {
            let flags = resolve_svm_flags(
                &cfg,
                args.nu,
                args.subsets,
                args.set_size,
                args.sigma,
                args.rho,
                args.target_alpha,
                args.validation_subsets,
                None,
                None,
                None,
            )?;
            let seed = resolve_seed(args.seed, &cfg)?;
            cfg.finish()?;
            let model: OcsvmModel = match &args.model {
                Some(path) => {
                    let r =
                        BufReader::new(File::open(path).map_err(|e| {
                            fail(format!("cannot open model {}: {e}", path.display()))
                        })?);
                    OcsvmModel::read_text(r)?
                }
                None => {
                    let (sigma, source) = match flags.sigma {
                        Some(s) => (s, "fixed"),
                        None => (median_heuristic(train_set.points())?, "median heuristic"),
                    };
                    let spec = BaseKernelSpec::gaussian(sigma)?;
                    echo_svm(&flags, sigma, source, seed);
                    train(&train_set, &svm_config(&flags), &spec, seed)?
                }
            };
            let outcome = model.decide(&test_set)?;
            println!("method svm-set");
            println!("score {}", sig4(outcome.score));
            println!("rho {}", sig4(model.rho()));
            println!("decision {}", outcome.decision);
            Ok(decision_exit(outcome.decision))
        }
        MethodArg::Mmd => {
            let alpha = cfg.resolve(args.alpha, "alpha", 0.05)?;
            let iters = cfg.resolve(args.iters, "iters", 100usize)?;
            let set_size = cfg.resolve(args.set_size, "set-size", 7usize)?;
            let sigma_flag = cfg.resolve_opt(args.sigma, "sigma")?;
            let seed = resolve_seed(args.seed, &cfg)?;
            cfg.finish()?;
            let sigma = match sigma_flag {
                Some(s) => s,
                None => median_heuristic(train_set.points())?,
            };
            let spec = BaseKernelSpec::gaussian(sigma)?;
            let threshold = if let Some(value) = args.threshold {
                MmdThreshold {
                    value,
                    alpha,
                    bootstrap_iters: 0,
                    seed,
                    set_size,
                    sigma,
                }
            } else if let Some(path) = &args.threshold_file {
                let r =
                    BufReader::new(File::open(path).map_err(|e| {
                        fail(format!("cannot open threshold {}: {e}", path.display()))
                    })?);
                MmdThreshold::read_text(r)?
            } else {
                bootstrap_threshold(&train_set, set_size, alpha, iters, &spec, seed)?
            };
            if let Some(path) = &args.threshold_out {
                let mut w = guarded_writer(path, args.force)?;
                threshold.write_text(&mut w)?;
                w.flush()?;
                println!("wrote {}", path.display());
            }
            let outcome = mmd_two_sample_test(&train_set, &test_set, &threshold, &spec, seed)?;
            println!("method mmd");
            println!("seed {seed}");
            println!("config sigma {}", sig4(sigma));
            println!("config alpha {}", sig4(threshold.alpha));
            println!("config set_size {}", threshold.set_size);
            println!("statistic {}", sig4(outcome.statistic));
            println!("threshold {}", sig4(threshold.value));
            println!("decision {}", outcome.decision);
            Ok(decision_exit(outcome.decision))
        }
        MethodArg::FTest | MethodArg::TTest => {
            let alpha = cfg.resolve(args.alpha, "alpha", 0.05)?;
            cfg.finish()?;
            let base = if args.method == MethodArg::FTest {
                BaseTest::FTest
            } else {
                BaseTest::TTest
            };
            let decision = union_multivariate_test(&train_set, &test_set, base, alpha)?;
            println!(
                "method {}",
                if base == BaseTest::FTest {
                    "f-test"
                } else {
                    "t-test"
                }
            );
            println!("config alpha {}", sig4(alpha));
            println!(
                "rule union over {} coordinates at per-coordinate level alpha",
                train_set.dim()
            );
            if train_set.dim() == 1 {
                let a: Vec<f64> = train_set.points().iter().map(|p| p[0]).collect();
                let b: Vec<f64> = test_set.points().iter().map(|p| p[0]).collect();
                let r = match base {
                    BaseTest::FTest => f_test_equal_variance(&a, &b, alpha)?,
                    BaseTest::TTest => t_test_equal_mean(&a, &b, alpha)?,
                };
                println!("statistic {}", sig4(r.statistic));
                println!("p_value {}", sig4(r.p_value));
            }
            println!("decision {decision}");
            Ok(decision_exit(decision))
        }
    }
}

fn write_report(report: &TestReport, prefix: &Path, force: bool) -> Result<(), Failure> {
    let txt = prefix.with_extension("txt");
    let csv = prefix.with_extension("csv");
    let mut w = guarded_writer(&txt, force)?;
    report.write_text(&mut w)?;
    w.flush()?;
    let mut w = guarded_writer(&csv, force)?;
    report.write_csv(&mut w)?;
    w.flush()?;
    println!("wrote {}", txt.display());
    println!("wrote {}", csv.display());
    Ok(())
}

fn print_report_summary(report: &TestReport) {
    println!(
        "{:<16}{:>6}{:>10}{:>10}",
        "method", "dim", "type-I", "type-II"
    );
    for r in &report.records {
        println!(
            "{:<16}{:>6}{:>10}{:>10}",
            r.method,
            r.dimension,
            sig4(r.type_i),
            sig4(r.type_ii)
        );
    }
}

fn cmd_benchmark_gaussian(args: BenchGaussianArgs) -> CliResult {
    let cfg = load_config(&args.config)?;
    let default_reps = if args.full_scale { 100 } else { 20 };
    let dims_str = cfg.resolve_opt(args.dims, "dims")?;
    let dims: Vec<usize> = match dims_str {
        Some(s) => s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| fail(format!("bad dimension {t:?}")))
            })
            .collect::<Result<_, _>>()?,
        None => vec![2, 5, 10, 25, 50],
    };
    let bench = GaussianBenchmarkConfig {
        dims,
        sigma1: cfg.resolve(args.sigma1, "sigma1", 1.5)?,
        sigma2: cfg.resolve(args.sigma2, "sigma2", 3.5)?,
        repetitions: cfg.resolve(args.reps, "reps", default_reps)?,
        trials_per_side: cfg.resolve(args.trials, "trials", 1000usize)?,
        set_size: cfg.resolve(args.set_size, "set-size", 7usize)?,
        svm_nu: cfg.resolve(args.nu, "nu", 0.1)?,
        svm_subsets: cfg.resolve(args.subsets, "subsets", 100usize)?,
        svm_sigma: cfg.resolve(args.svm_sigma, "svm-sigma", 10.0)?,
        mmd_bandwidth: match cfg.resolve_opt(args.mmd_bandwidth, "mmd-bandwidth")? {
            Some(s) => parse_bandwidth(&s)?,
            None => MmdBandwidth::default(),
        },
        mmd_alpha: cfg.resolve(args.alpha, "alpha", 0.05)?,
        baseline_alpha: cfg.resolve(None, "baseline-alpha", 0.05)?,
        ..GaussianBenchmarkConfig::default()
    };
    let seed = resolve_seed(args.seed, &cfg)?;
    cfg.finish()?;

    println!("seed {seed}");
    let report = run_gaussian_benchmark(&bench, seed)?;
    print_report_summary(&report);
    write_report(&report, &args.out, args.force)?;
    Ok(0)
}

fn cmd_benchmark_expression(args: BenchExpressionArgs) -> CliResult {
    let cfg = load_config(&args.config)?;
    let fixture_name = cfg.resolve_opt(args.fixture, "fixture")?;
    let reps = cfg.resolve(args.reps, "reps", 20usize)?;
    let trials = cfg.resolve(args.trials, "trials", 1000usize)?;
    let bench = ExpressionBenchmarkConfig {
        repetitions: reps,
        trials_per_side: trials,
        svm_nu: cfg.resolve(args.nu, "nu", 0.1)?,
        svm_subsets: cfg.resolve(args.subsets, "subsets", 100usize)?,
        svm_sigma: cfg.resolve(args.svm_sigma, "svm-sigma", 1.0)?,
        mmd_bandwidth: match cfg.resolve_opt(args.mmd_bandwidth, "mmd-bandwidth")? {
            Some(s) => parse_bandwidth(&s)?,
            None => MmdBandwidth::default(),
        },
        mmd_alpha: cfg.resolve(args.alpha, "alpha", 0.05)?,
        baseline_alpha: cfg.resolve(None, "baseline-alpha", 0.05)?,
        ..ExpressionBenchmarkConfig::default()
    };
    let seed = resolve_seed(args.seed, &cfg)?;

    let (positive, negative, train_count, leaveout_count, set_size, label) = if let Some(name) =
        fixture_name
    {
        cfg.finish()?;
        let spec = fixture_spec(&name)?;
        let fx = fixtures::generate(spec);
        (
            fx.positive,
            fx.negative,
            spec.train_positive,
            spec.leaveout_positive,
            spec.set_size,
            name,
        )
    } else {
        let train_count = cfg.resolve_opt(args.train_count, "train-count")?;
        let leaveout_count = cfg.resolve_opt(args.leaveout_count, "leaveout-count")?;
        let set_size = cfg.resolve_opt(args.set_size, "set-size")?;
        cfg.finish()?;
        let (pos_path, neg_path) = match (&args.positive, &args.negative) {
                (Some(p), Some(n)) => (p, n),
                _ => {
                    return Err(fail(
                        "need --fixture NAME, or --positive and --negative CSVs with --train-count/--leaveout-count/--set-size",
                    ))
                }
            };
        let orientation: Orientation = args.orientation.into();
        let pos = load_matrix_csv(pos_path, orientation)
            .map_err(|e| fail(format!("{}: {e}", pos_path.display())))?;
        let neg = load_matrix_csv(neg_path, orientation)
            .map_err(|e| fail(format!("{}: {e}", neg_path.display())))?;
        let missing =
            || fail("--train-count, --leaveout-count and --set-size are required with CSV input");
        (
            pos.rows,
            neg.rows,
            train_count.ok_or_else(missing)?,
            leaveout_count.ok_or_else(missing)?,
            set_size.ok_or_else(missing)?,
            "custom".to_string(),
        )
    };

    let split = split_dataset(
        &positive,
        &negative,
        train_count,
        leaveout_count,
        set_size,
        derive_seed(seed, 3),
    )?;
    println!("seed {seed}");
    println!("config dataset {label}");
    println!("config set_size {set_size}");
    let report = run_expression_benchmark(&split, &bench, seed)?;
    print_report_summary(&report);
    write_report(&report, &args.out, args.force)?;
    Ok(0)
}

fn cmd_fixture(args: FixtureArgs) -> CliResult {
    if args.manifest {
        print!("{}", fixtures::manifest());
        if args.name.is_none() && args.out.is_none() {
            return Ok(0);
        }
    }
    let Some(out) = &args.out else {
        if args.manifest {
            return Ok(0);
        }
        return Err(fail(
            "nothing to do: pass --manifest and/or --name with --out",
        ));
    };
    if !out.is_dir() {
        return Err(fail(format!(
            "output directory {} does not exist",
            out.display()
        )));
    }
    let specs: Vec<_> = match &args.name {
        Some(name) => vec![fixture_spec(name)?],
        None => FIXTURES.iter().collect(),
    };
    for spec in specs {
        let fx = fixtures::generate(spec);
        let pos = out.join(format!("{}_positive.csv", spec.name));
        let neg = out.join(format!("{}_negative.csv", spec.name));
        if (pos.exists() || neg.exists()) && !args.force {
            return Err(fail(format!(
                "refusing to overwrite {} fixtures (pass --force)",
                spec.name
            )));
        }
        write_matrix_csv(&pos, &fx.positive, true)?;
        write_matrix_csv(&neg, &fx.negative, true)?;
        println!("wrote {}", pos.display());
        println!("wrote {}", neg.display());
    }
    Ok(0)
}
