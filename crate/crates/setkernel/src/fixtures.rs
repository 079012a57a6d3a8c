//! Deterministic expression-matrix fixtures.
//!
//! Six synthetic data sets matching the row/column shapes of well-known
//! cancer gene-expression benchmarks. The repo does not vendor the original
//! matrices (they are large and externally licensed); instead each fixture is
//! regenerated bit-exactly from a fixed seed, and `data/fixtures_manifest.txt`
//! records shape plus SHA-256 of the canonical CSV serialization so drop-in
//! replacements can be verified.
//!
//! The content is constructed for separability rather than realism: positive
//! rows form one extremely tight cluster (base + 1e-11 Gaussian noise, so at
//! unit kernel bandwidth every within-class kernel value rounds to exactly
//! 1.0), and negative rows sit 3.0 away per coordinate (cross-class kernel
//! values underflow to exactly 0.0). Error rates measured on these fixtures
//! exercise the pipeline; they are not comparable to results on the real
//! expression matrices.

use sha2::{Digest, Sha256};

use crate::data::matrix_to_csv_string;
use crate::error::{Error, Result};
use crate::rng::{self, NormalSource};

/// Shape of one fixture, mirroring the published data-set dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixtureSpec {
    pub name: &'static str,
    pub train_positive: usize,
    pub leaveout_positive: usize,
    pub test_negative: usize,
    pub set_size: usize,
    pub dimensions: usize,
    /// Canonical generation seed recorded in the manifest.
    pub seed: u64,
}

impl FixtureSpec {
    pub fn positive_rows(&self) -> usize {
        self.train_positive + self.leaveout_positive
    }
}

/// All shipped fixture shapes.
pub const FIXTURES: [FixtureSpec; 6] = [
    FixtureSpec {
        name: "lung",
        train_positive: 21,
        leaveout_positive: 10,
        test_negative: 150,
        set_size: 7,
        dimensions: 12533,
        seed: 0xF1A1,
    },
    FixtureSpec {
        name: "leukemia",
        train_positive: 17,
        leaveout_positive: 8,
        test_negative: 47,
        set_size: 5,
        dimensions: 7129,
        seed: 0xF1A2,
    },
    FixtureSpec {
        name: "lymphoma_outcome",
        train_positive: 17,
        leaveout_positive: 9,
        test_negative: 32,
        set_size: 6,
        dimensions: 7129,
        seed: 0xF1A3,
    },
    FixtureSpec {
        name: "lymphoma",
        train_positive: 13,
        leaveout_positive: 6,
        test_negative: 58,
        set_size: 4,
        dimensions: 7129,
        seed: 0xF1A4,
    },
    FixtureSpec {
        name: "cns",
        train_positive: 14,
        leaveout_positive: 7,
        test_negative: 39,
        set_size: 4,
        dimensions: 7129,
        seed: 0xF1A5,
    },
    FixtureSpec {
        name: "colon",
        train_positive: 15,
        leaveout_positive: 7,
        test_negative: 40,
        set_size: 4,
        dimensions: 2000,
        seed: 0xF1A6,
    },
];

/// Looks a fixture up by name.
pub fn fixture_spec(name: &str) -> Result<&'static FixtureSpec> {
    FIXTURES.iter().find(|f| f.name == name).ok_or_else(|| {
        let names: Vec<&str> = FIXTURES.iter().map(|f| f.name).collect();
        Error::InvalidParameter(format!(
            "unknown fixture {name:?}; available: {}",
            names.join(", ")
        ))
    })
}

/// Within-class noise scale. Small enough that within-class squared distances
/// stay far below the rounding threshold of `exp` near 1 (so unit-bandwidth
/// kernel values between same-class rows are exactly 1.0), large enough that
/// rows stay distinct and per-coordinate variances are positive.
pub const POSITIVE_NOISE: f64 = 1e-11;

/// Per-coordinate shift of the negative class; squared class distance `9 d`
/// drives cross-class kernel values at unit bandwidth to exactly 0.0.
pub const NEGATIVE_SHIFT: f64 = 3.0;

/// A generated fixture: positive and negative expression-like matrices.
#[derive(Debug, Clone)]
pub struct ExpressionFixture {
    pub spec: &'static FixtureSpec,
    pub positive: Vec<Vec<f64>>,
    pub negative: Vec<Vec<f64>>,
}

/// Regenerates a fixture bit-exactly from its canonical seed.
pub fn generate(spec: &'static FixtureSpec) -> ExpressionFixture {
    let mut base_rng = rng::stream(rng::derive_seed(spec.seed, 1), 0);
    let base: Vec<f64> = (0..spec.dimensions)
        .map(|_| 2.0 * rng::uniform(&mut base_rng))
        .collect();

    let mut pos_noise = NormalSource::from_seed(spec.seed, 2);
    let positive = (0..spec.positive_rows())
        .map(|_| {
            base.iter()
                .map(|b| b + POSITIVE_NOISE * pos_noise.sample())
                .collect()
        })
        .collect();

    let mut neg_noise = NormalSource::from_seed(spec.seed, 3);
    let negative = (0..spec.test_negative)
        .map(|_| {
            base.iter()
                .map(|b| b + NEGATIVE_SHIFT + POSITIVE_NOISE * neg_noise.sample())
                .collect()
        })
        .collect();

    ExpressionFixture {
        spec,
        positive,
        negative,
    }
}

fn sha256_hex(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl ExpressionFixture {
    pub fn positive_csv(&self) -> String {
        matrix_to_csv_string(&self.positive)
    }

    pub fn negative_csv(&self) -> String {
        matrix_to_csv_string(&self.negative)
    }

    /// One manifest line: name, shape fields, and SHA-256 of both canonical
    /// CSV serializations.
    pub fn manifest_line(&self) -> String {
        format!(
            "{} rows_pos={} rows_neg={} dims={} set_size={} seed={:#x} sha256_pos={} sha256_neg={}",
            self.spec.name,
            self.spec.positive_rows(),
            self.spec.test_negative,
            self.spec.dimensions,
            self.spec.set_size,
            self.spec.seed,
            sha256_hex(&self.positive_csv()),
            sha256_hex(&self.negative_csv()),
        )
    }
}

/// The full manifest text for every shipped fixture.
pub fn manifest() -> String {
    let mut out = String::from("# setkernel fixture manifest v1\n");
    for spec in &FIXTURES {
        out.push_str(&generate(spec).manifest_line());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::gaussian_kernel_raw;

    #[test]
    fn shapes_match_the_declared_table() {
        let colon = fixture_spec("colon").unwrap();
        assert_eq!(colon.set_size, 4);
        assert_eq!(colon.dimensions, 2000);
        let f = generate(colon);
        assert_eq!(f.positive.len(), 22);
        assert_eq!(f.negative.len(), 40);
        assert_eq!(f.positive[0].len(), 2000);

        assert!(fixture_spec("nope").is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = fixture_spec("colon").unwrap();
        let a = generate(spec);
        let b = generate(spec);
        assert_eq!(a.positive, b.positive);
        assert_eq!(a.negative, b.negative);
    }

    #[test]
    fn kernel_saturation_and_underflow_hold_at_unit_bandwidth() {
        let f = generate(fixture_spec("colon").unwrap());
        // within-class kernel values round to exactly 1.0
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert_eq!(
                    gaussian_kernel_raw(&f.positive[i], &f.positive[j], 1.0),
                    1.0
                );
            }
        }
        // rows are still distinct points
        assert_ne!(f.positive[0], f.positive[1]);
        // cross-class kernel values underflow to exactly 0.0
        for i in 0..3 {
            assert_eq!(
                gaussian_kernel_raw(&f.positive[i], &f.negative[i], 1.0),
                0.0
            );
        }
    }
}
