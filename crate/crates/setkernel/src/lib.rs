//! Kernel two-sample hypothesis testing on an RKHS of sets.
//!
//! A finite set of vectors is treated as a single point in a reproducing
//! kernel Hilbert space by averaging the feature maps of its elements. The
//! inner product between two such points is the set kernel
//! `K(X, Y) = (1/nm) sum_ij k(x_i, y_j)`; the induced squared distance is the
//! empirical maximum mean discrepancy. On top of that geometry the crate
//! provides two set-level two-sample tests plus classical baselines:
//!
//! - [`mmd`]: threshold the empirical MMD, calibrated by a subset bootstrap;
//! - [`ocsvm`]: train a one-class SVM over random training subsets and reject
//!   test sets that fall outside its boundary;
//! - [`classical`]: per-coordinate F/T tests combined by a union rule;
//! - [`bayes`]: Monte Carlo estimates of the per-point and per-set Bayes
//!   errors of known Gaussian pairs;
//! - [`experiments`]: the benchmark harness comparing all methods on
//!   synthetic Gaussian data and expression-matrix fixtures.
//!
//! Everything stochastic draws from seeded ChaCha12 streams (normals via
//! Box-Muller; see [`rng`]), so all results reproduce bit-for-bit from a
//! seed.
//!
//! ```
//! use setkernel::{BaseKernelSpec, SampleSet, set_kernel, set_distance_sq};
//!
//! let spec = BaseKernelSpec::gaussian(1.0)?;
//! let x = SampleSet::new(vec![vec![0.0, 0.0], vec![0.4, -0.2]])?;
//! let y = SampleSet::new(vec![vec![0.1, 0.1]])?;
//! let k = set_kernel(&x, &y, &spec)?;
//! assert!(k > 0.0 && k <= 1.0);
//! assert!(set_distance_sq(&x, &x, &spec)? <= 1e-12);
//! # Ok::<(), setkernel::Error>(())
//! ```

// validations use negated comparisons (`!(x > 0.0)`) so NaN fails them too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bayes;
pub mod classical;
pub mod data;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod kernel;
pub mod mmd;
pub mod ocsvm;
mod pooled;
pub mod rng;
pub mod set;
pub mod set_kernel;

pub use error::{Error, Result};
pub use kernel::{gaussian_kernel, gram_matrix, median_heuristic, BaseKernelSpec};
pub use mmd::{bootstrap_threshold, empirical_mmd, mmd_two_sample_test, MmdThreshold};
pub use ocsvm::{sample_subsets, solve_dual, train, OcsvmConfig, OcsvmModel};
pub use set::SampleSet;
pub use set_kernel::{set_distance_sq, set_gram, set_kernel, set_norm_sq, SetGram};

/// Outcome of a two-sample test: does the test set come from the training
/// distribution?
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Same,
    Different,
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Decision::Same => write!(f, "Same"),
            Decision::Different => write!(f, "Different"),
        }
    }
}

#[cfg(doctest)]
mod book {
    //! Every fenced Rust block in the guide runs under `cargo test --doc`.
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(kernels, "../../../book/src/kernels.md");
    chapter!(set_rkhs, "../../../book/src/set-rkhs.md");
    chapter!(mmd_testing, "../../../book/src/mmd-testing.md");
    chapter!(one_class_svm, "../../../book/src/one-class-svm.md");
    chapter!(
        classical_baselines,
        "../../../book/src/classical-baselines.md"
    );
    chapter!(set_bayes_error, "../../../book/src/set-bayes-error.md");
    chapter!(
        data_and_benchmarks,
        "../../../book/src/data-and-benchmarks.md"
    );
    chapter!(command_line, "../../../book/src/command-line.md");
}
