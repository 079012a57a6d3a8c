//! Acceptance suite: one test per release criterion, each printing a
//! `ACCEPTANCE <id> ...: PASS` line with its measured runtime. Oracles here
//! are deliberately independent of the library's computation paths (literal
//! triple loops, eigendecompositions, projected gradient, quadrature,
//! analytic formulas).
//!
//! Run with `cargo test --test acceptance -- --nocapture` (the workspace test
//! profile is optimized; the stochastic criteria assume that).

use std::time::Instant;

use setkernel::bayes::{error_components, GaussianPairProblem};
use setkernel::classical::{reg_incomplete_beta, union_multivariate_test, BaseTest};
use setkernel::data::split_dataset;
use setkernel::experiments::{
    run_expression_benchmark, run_gaussian_benchmark, ExpressionBenchmarkConfig,
    GaussianBenchmarkConfig,
};
use setkernel::fixtures::{generate, FIXTURES};
use setkernel::ocsvm::{solve_dual, OcsvmConfig};
use setkernel::rng::NormalSource;
use setkernel::set_kernel::set_gram;
use setkernel::{empirical_mmd, BaseKernelSpec, Decision, SampleSet};

fn random_points(seed: u64, n: usize, d: usize, scale: f64) -> Vec<Vec<f64>> {
    let mut src = NormalSource::from_seed(seed, 0);
    (0..n)
        .map(|_| (0..d).map(|_| scale * src.sample()).collect())
        .collect()
}

fn pass(id: u32, name: &str, started: Instant, detail: &str) {
    println!(
        "ACCEPTANCE {id} {name}: PASS ({:.2}s) {detail}",
        started.elapsed().as_secs_f64()
    );
}

/// Criterion 1: the empirical MMD equals a literal triple-double-loop
/// V-statistic oracle within 1e-12 on 200 random pairs, and is 0 on X vs X.
#[test]
fn criterion_01_mmd_identity_and_oracle() {
    let t0 = Instant::now();
    let mut max_err: f64 = 0.0;
    for case in 0..200u64 {
        let d = 1 + (case % 5) as usize;
        let n = 2 + (case % 9) as usize;
        let m = 2 + ((case / 5) % 9) as usize;
        let x = SampleSet::new(random_points(1000 + case, n, d, 1.5)).unwrap();
        let y = SampleSet::new(random_points(2000 + case, m, d, 1.5)).unwrap();
        let sigma = 0.5 + 2.0 * (case % 7) as f64 / 7.0;
        let spec = BaseKernelSpec::gaussian(sigma).unwrap();

        // literal three-double-loop oracle with its own kernel arithmetic
        let kernel = |a: &[f64], b: &[f64]| -> f64 {
            let mut d2 = 0.0;
            for i in 0..a.len() {
                d2 += (a[i] - b[i]) * (a[i] - b[i]);
            }
            (-d2 / (2.0 * sigma * sigma)).exp()
        };
        let mut kxx = 0.0;
        for a in x.points() {
            for b in x.points() {
                kxx += kernel(a, b);
            }
        }
        let mut kxy = 0.0;
        for a in x.points() {
            for b in y.points() {
                kxy += kernel(a, b);
            }
        }
        let mut kyy = 0.0;
        for a in y.points() {
            for b in y.points() {
                kyy += kernel(a, b);
            }
        }
        let nf = n as f64;
        let mf = m as f64;
        let oracle = kxx / (nf * nf) - 2.0 * kxy / (nf * mf) + kyy / (mf * mf);

        let got = empirical_mmd(&x, &y, &spec).unwrap();
        let err = (got - oracle).abs();
        max_err = max_err.max(err);
        assert!(err <= 1e-12, "case {case}: |{got} - {oracle}| = {err}");

        let self_mmd = empirical_mmd(&x, &x, &spec).unwrap();
        assert!(
            self_mmd.abs() <= 1e-12,
            "case {case}: mmd(X,X) = {self_mmd}"
        );
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "runtime {elapsed:?} >= 1s");
    pass(
        1,
        "mmd identity & oracle",
        t0,
        &format!("max |err| {max_err:.2e}"),
    );
}

/// Criterion 2: 100 random set Grams (up to 25 sets) have minimum eigenvalue
/// >= -1e-9 by an independent eigendecomposition.
#[test]
fn criterion_02_set_gram_psd() {
    let t0 = Instant::now();
    let mut min_eig = f64::INFINITY;
    for case in 0..100u64 {
        let l = 2 + (case % 24) as usize;
        let d = 1 + (case % 4) as usize;
        let sets: Vec<SampleSet> = (0..l)
            .map(|i| {
                SampleSet::new(random_points(
                    3000 + case * 31 + i as u64,
                    2 + ((case + i as u64) % 5) as usize,
                    d,
                    1.5,
                ))
                .unwrap()
            })
            .collect();
        let sigma = 0.4 + (case % 5) as f64 * 0.5;
        let spec = BaseKernelSpec::gaussian(sigma).unwrap();
        let gram = set_gram(&sets, &spec).unwrap();
        let eig = gram.matrix().clone().symmetric_eigen();
        let lo = eig
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        min_eig = min_eig.min(lo);
        assert!(lo >= -1e-9, "case {case}: min eigenvalue {lo}");
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "runtime {elapsed:?} >= 10s");
    pass(
        2,
        "set-kernel PSD",
        t0,
        &format!("min eigenvalue {min_eig:.2e}"),
    );
}

/// Exact projection onto the box-constrained simplex, for the oracle.
fn project_box_simplex(v: &[f64], c: f64) -> Vec<f64> {
    let eval = |tau: f64| -> f64 { v.iter().map(|&vi| (vi - tau).clamp(0.0, c)).sum() };
    let mut bps: Vec<f64> = v.iter().flat_map(|&vi| [vi, vi - c]).collect();
    bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut lo = bps[0] - 1.0;
    let mut hi = *bps.last().unwrap();
    for &b in &bps {
        if eval(b) >= 1.0 {
            lo = b;
        } else {
            hi = b;
            break;
        }
    }
    let (glo, ghi) = (eval(lo), eval(hi));
    let tau = if (glo - ghi).abs() < 1e-300 {
        lo
    } else {
        lo + (glo - 1.0) * (hi - lo) / (glo - ghi)
    };
    v.iter().map(|&vi| (vi - tau).clamp(0.0, c)).collect()
}

/// Criterion 3: the SMO dual solver matches an exhaustive projected-gradient
/// reference (1e6 iterations, step 1e-3) within 1e-5 in objective on 50
/// random instances of size up to 8, with feasible multipliers.
#[test]
fn criterion_03_dual_solver_oracle() {
    let t0 = Instant::now();
    let mut max_gap: f64 = 0.0;
    for case in 0..50u64 {
        let l = 2 + (case % 7) as usize; // up to 8
        let nu = [0.3, 0.5, 0.75, 1.0][(case % 4) as usize];
        if nu * (l as f64) < 1.0 {
            continue;
        }
        let sets: Vec<SampleSet> = (0..l)
            .map(|i| SampleSet::new(random_points(5000 + case * 17 + i as u64, 3, 2, 1.2)).unwrap())
            .collect();
        let spec = BaseKernelSpec::gaussian(1.0).unwrap();
        let gram = set_gram(&sets, &spec).unwrap();
        let config = OcsvmConfig::new(nu, l, 3).unwrap();
        let sol = solve_dual(&gram, &config).unwrap();

        // feasibility at the stated tolerances
        let c = 1.0 / (nu * l as f64);
        let sum: f64 = sol.alphas.iter().sum();
        assert!((sum - 1.0).abs() <= 1e-8, "case {case}: sum {sum}");
        for &a in &sol.alphas {
            assert!(a >= -1e-9 && a <= c + 1e-9, "case {case}: alpha {a}");
        }

        // independent projected-gradient reference
        let g = gram.matrix();
        let mut a = vec![1.0 / l as f64; l];
        for _ in 0..1_000_000 {
            let mut v = a.clone();
            for i in 0..l {
                let mut gi = 0.0;
                for j in 0..l {
                    gi += g[(i, j)] * a[j];
                }
                v[i] -= 1e-3 * gi;
            }
            a = project_box_simplex(&v, c);
        }
        let mut oracle_obj = 0.0;
        for i in 0..l {
            for j in 0..l {
                oracle_obj += a[i] * a[j] * g[(i, j)];
            }
        }
        oracle_obj *= 0.5;
        let gap = (sol.objective - oracle_obj).abs();
        max_gap = max_gap.max(gap);
        assert!(
            gap <= 1e-5,
            "case {case}: smo {} vs oracle {oracle_obj}",
            sol.objective
        );
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "runtime {elapsed:?} >= 30s");
    pass(
        3,
        "dual-solver oracle",
        t0,
        &format!("max objective gap {max_gap:.2e}"),
    );
}

/// Criterion 4: the union F-test's simulated null rejection rate matches the
/// analytic 1 - 0.95^d within 3 absolute points for d in {2, 10, 25, 50}.
#[test]
fn criterion_04_union_baseline_analytic() {
    let t0 = Instant::now();
    let trials = 10_000;
    let mut detail = String::new();
    for (di, &d) in [2usize, 10, 25, 50].iter().enumerate() {
        let mut src = NormalSource::from_seed(7000 + di as u64, 0);
        let mut rejections = 0;
        for _ in 0..trials {
            let a = SampleSet::new(
                (0..7)
                    .map(|_| (0..d).map(|_| src.sample()).collect())
                    .collect(),
            )
            .unwrap();
            let b = SampleSet::new(
                (0..7)
                    .map(|_| (0..d).map(|_| src.sample()).collect())
                    .collect(),
            )
            .unwrap();
            if union_multivariate_test(&a, &b, BaseTest::FTest, 0.05).unwrap()
                == Decision::Different
            {
                rejections += 1;
            }
        }
        let rate = rejections as f64 / trials as f64;
        let analytic = 1.0 - 0.95f64.powi(d as i32);
        assert!(
            (rate - analytic).abs() <= 0.03,
            "d={d}: simulated {rate:.4} vs analytic {analytic:.4}"
        );
        detail.push_str(&format!(
            "d={d}:{:.1}%/{:.1}% ",
            rate * 100.0,
            analytic * 100.0
        ));
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "runtime {elapsed:?} >= 60s");
    pass(4, "union baseline analytic", t0, detail.trim());
}

fn record<'a>(
    report: &'a setkernel::experiments::TestReport,
    method: &str,
) -> &'a setkernel::experiments::MethodRecord {
    report
        .records
        .iter()
        .find(|r| r.method == method)
        .unwrap_or_else(|| panic!("no record for {method}"))
}

/// Criterion 5: desk-scale reproduction of the easier Gaussian pair at
/// dimension 10 over 20 repetitions: the set-kernel SVM keeps type-II at or
/// below 2% with type-I in [1%, 8%], while the MMD baseline misses at least
/// half the alternatives.
#[test]
fn criterion_05_gaussian_desk_scale() {
    let t0 = Instant::now();
    let cfg = GaussianBenchmarkConfig {
        dims: vec![10],
        repetitions: 20,
        ..GaussianBenchmarkConfig::default()
    };
    let report = run_gaussian_benchmark(&cfg, 20250501).unwrap();
    let svm = record(&report, "SVM+SetKernel");
    let mmd = record(&report, "MMD");
    assert!(svm.type_ii <= 0.02, "SVM type-II {:.4} > 0.02", svm.type_ii);
    assert!(
        svm.type_i >= 0.01 && svm.type_i <= 0.08,
        "SVM type-I {:.4} outside [0.01, 0.08]",
        svm.type_i
    );
    assert!(mmd.type_ii >= 0.50, "MMD type-II {:.4} < 0.50", mmd.type_ii);
    let elapsed = t0.elapsed();
    assert!(
        elapsed.as_secs_f64() < 600.0,
        "runtime {elapsed:?} >= 10min"
    );
    pass(
        5,
        "gaussian desk-scale (dim 10)",
        t0,
        &format!(
            "svm {:.2}%/{:.2}%, mmd {:.2}%/{:.2}%",
            svm.type_i * 100.0,
            svm.type_ii * 100.0,
            mmd.type_i * 100.0,
            mmd.type_ii * 100.0
        ),
    );
}

/// Criterion 6: the harder Gaussian pair at dimension 50: the set-kernel SVM's
/// total error stays strictly below the MMD's total error.
#[test]
fn criterion_06_gaussian_hard_pair_trend() {
    let t0 = Instant::now();
    let cfg = GaussianBenchmarkConfig {
        dims: vec![50],
        sigma2: 1.7,
        repetitions: 20,
        ..GaussianBenchmarkConfig::default()
    };
    let report = run_gaussian_benchmark(&cfg, 20250502).unwrap();
    let svm = record(&report, "SVM+SetKernel");
    let mmd = record(&report, "MMD");
    let svm_total = svm.type_i + svm.type_ii;
    let mmd_total = mmd.type_i + mmd.type_ii;
    assert!(
        svm_total < mmd_total,
        "SVM total {svm_total:.4} not below MMD total {mmd_total:.4}"
    );
    let elapsed = t0.elapsed();
    assert!(
        elapsed.as_secs_f64() < 600.0,
        "runtime {elapsed:?} >= 10min"
    );
    pass(
        6,
        "gaussian hard pair (dim 50)",
        t0,
        &format!(
            "svm total {:.2}% vs mmd total {:.2}%",
            svm_total * 100.0,
            mmd_total * 100.0
        ),
    );
}

/// Criterion 7: set-level error theory. At n = 1 the set error equals the
/// per-point error exactly; it never exceeds the per-point error beyond Monte
/// Carlo slack; the 1-D equal-variance case matches the normal-CDF closed
/// form within 1e-3.
#[test]
fn criterion_07_set_bayes_error_theory() {
    let t0 = Instant::now();

    // closed form: threshold at the midpoint, error Phi(-1)
    let p = GaussianPairProblem::new(vec![0.0], vec![2.0], 1.0, 1.0).unwrap();
    let c = error_components(&p, 1_000_000, 9001).unwrap();
    let phi_m1 = 0.15865525393145707;
    assert!(
        (c.bayes_error() - phi_m1).abs() <= 1e-3,
        "1-D closed form: {} vs {phi_m1}",
        c.bayes_error()
    );
    let set2 = 0.5 * (phi_m1 * phi_m1 + phi_m1 * phi_m1);
    assert!(
        (c.set_bayes_error(2) - set2).abs() <= 1e-3,
        "n=2 closed form: {} vs {set2}",
        c.set_bayes_error(2)
    );

    // 20 random problems
    let mut src = NormalSource::from_seed(9002, 0);
    for case in 0..20u64 {
        let d = 1 + (case % 6) as usize;
        let mean_p: Vec<f64> = (0..d).map(|_| src.sample()).collect();
        let mean_q: Vec<f64> = (0..d).map(|_| src.sample()).collect();
        let sigma_p = 0.5 + src.sample().abs();
        let sigma_q = 0.5 + src.sample().abs();
        let problem = GaussianPairProblem::new(mean_p, mean_q, sigma_p, sigma_q).unwrap();
        let comp = error_components(&problem, 20_000, 9100 + case).unwrap();
        let bayes = comp.bayes_error();
        assert_eq!(comp.set_bayes_error(1), bayes, "case {case}: n=1 identity");
        let slack = 3.0 * comp.bayes_std_error();
        for n in [1u32, 2, 5, 10] {
            let set_err = comp.set_bayes_error(n);
            assert!(
                set_err <= bayes + slack,
                "case {case} n={n}: {set_err} > {bayes} + {slack}"
            );
        }
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "runtime {elapsed:?} >= 60s");
    pass(
        7,
        "set-level error theory",
        t0,
        &format!("1-D bayes {:.5} vs {phi_m1:.5}", c.bayes_error()),
    );
}

/// Criterion 8: on every shape-matched separable fixture the set-kernel SVM
/// is exact (0% type-I, 0% type-II over 20 repetitions) while the union
/// T-test rejects essentially every null set at 7129+ dimensions. The exact
/// error percentages of the original expression matrices are explicitly not
/// reproduced, and the report metadata says so.
#[test]
fn criterion_08_expression_pipeline_separability() {
    let t0 = Instant::now();
    let cfg = ExpressionBenchmarkConfig {
        repetitions: 20,
        ..ExpressionBenchmarkConfig::default()
    };
    let mut detail = String::new();
    for spec in &FIXTURES {
        let fixture = generate(spec);
        let split = split_dataset(
            &fixture.positive,
            &fixture.negative,
            spec.train_positive,
            spec.leaveout_positive,
            spec.set_size,
            40_000 + spec.seed,
        )
        .unwrap();
        let report = run_expression_benchmark(&split, &cfg, 50_000 + spec.seed).unwrap();
        let svm = record(&report, "SVM+SetKernel");
        assert_eq!(
            svm.rejected_null, 0,
            "{}: SVM rejected {} null sets",
            spec.name, svm.rejected_null
        );
        assert_eq!(
            svm.accepted_alt, 0,
            "{}: SVM accepted {} alternative sets",
            spec.name, svm.accepted_alt
        );
        let ttest = record(&report, "T-Test");
        if spec.dimensions >= 7129 {
            assert!(
                ttest.type_i >= 0.99,
                "{}: T-test type-I {:.4} < 0.99",
                spec.name,
                ttest.type_i
            );
        }
        assert!(
            report
                .metadata
                .iter()
                .any(|(k, v)| k == "fixture_note" && v.contains("not reproduced")),
            "{}: missing fixture metadata note",
            spec.name
        );
        detail.push_str(&format!(
            "{}:svm 0/0,t {:.0}% ",
            spec.name,
            ttest.type_i * 100.0
        ));
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "runtime {elapsed:?} >= 5min");
    pass(8, "expression pipeline separability", t0, detail.trim());
}

/// Criterion 10: the regularized incomplete beta matches a million-panel
/// Simpson quadrature oracle (Kahan-summed) within 1e-9 across a 200-point
/// grid of (x, a, b) with shapes up to 50.
#[test]
fn criterion_10_incomplete_beta_quadrature() {
    let t0 = Instant::now();

    fn ln_gamma_oracle(mut x: f64) -> f64 {
        // Stirling series with argument shift; independent of the library's
        // Lanczos implementation
        let mut shift = 0.0;
        while x < 12.0 {
            shift -= x.ln();
            x += 1.0;
        }
        let inv = 1.0 / x;
        let inv2 = inv * inv;
        let series = inv / 12.0 - inv * inv2 / 360.0 + inv * inv2 * inv2 / 1260.0
            - inv * inv2 * inv2 * inv2 / 1680.0;
        shift + 0.5 * ((2.0 * std::f64::consts::PI).ln() - x.ln()) + x * (x.ln() - 1.0) + series
    }

    fn oracle(x: f64, a: f64, b: f64) -> f64 {
        let panels = 1_000_000usize;
        let h = x / panels as f64;
        let f = |t: f64| -> f64 {
            if t <= 0.0 {
                // grid keeps a >= 1; the a = 1 integrand tends to 1 at t = 0
                if a == 1.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                ((a - 1.0) * t.ln() + (b - 1.0) * (1.0 - t).ln()).exp()
            }
        };
        // Kahan-compensated Simpson rule
        let mut sum = f(0.0) + f(x);
        let mut comp = 0.0;
        for i in 1..panels {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            let term = w * f(i as f64 * h);
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        let ln_beta = ln_gamma_oracle(a) + ln_gamma_oracle(b) - ln_gamma_oracle(a + b);
        sum * h / 3.0 / ln_beta.exp()
    }

    let xs = [0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95];
    let shapes = [1.0, 2.5, 6.0, 12.0, 25.0, 50.0];
    let mut checked = 0;
    let mut max_err: f64 = 0.0;
    'outer: for &a in &shapes {
        for &b in &shapes {
            for &x in &xs {
                if checked == 200 {
                    break 'outer;
                }
                let got = reg_incomplete_beta(x, a, b).unwrap();
                let want = oracle(x, a, b);
                let err = (got - want).abs();
                max_err = max_err.max(err);
                assert!(
                    err <= 1e-9,
                    "I_{x}({a},{b}): {got} vs {want} (err {err:.2e})"
                );
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 200);
    pass(
        10,
        "incomplete beta vs quadrature",
        t0,
        &format!("200 grid points, max |err| {max_err:.2e}"),
    );
}
