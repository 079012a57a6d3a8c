//! The RKHS on sets: set-kernel inner product, induced norm, induced distance,
//! and Gram matrices over collections of sets.
//!
//! A set `X = {x_1, ..., x_n}` is mapped to the average of its elementwise
//! feature maps; inner products between such images reduce to
//! `K(X, Y) = (1/nm) sum_i sum_j k(x_i, y_j)`, which is all this module ever
//! computes — the mapped vector itself is never materialized.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernel::{gaussian_kernel_raw, BaseKernelSpec};
use crate::set::SampleSet;

fn check_dims(x: &SampleSet, y: &SampleSet) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            actual: y.dim(),
        });
    }
    Ok(())
}

/// The set-kernel `K(X, Y) = (1/nm) sum_i sum_j k(x_i, y_j)`.
///
/// Symmetric, and in `(0, 1]` for the Gaussian base kernel. Invariant to point
/// order and to duplicating every point (the `1/nm` normalization).
///
/// Compiled once (`inline(never)`): every caller observes identical rounding.
#[inline(never)]
pub fn set_kernel(x: &SampleSet, y: &SampleSet, spec: &BaseKernelSpec) -> Result<f64> {
    check_dims(x, y)?;
    let mut acc = 0.0;
    for xi in x.points() {
        for yj in y.points() {
            acc += gaussian_kernel_raw(xi, yj, spec.sigma());
        }
    }
    Ok(acc / ((x.len() * y.len()) as f64))
}

/// Squared RKHS norm of the mapped set: `K(X, X)`; strictly positive and at
/// most 1 for the Gaussian base kernel.
pub fn set_norm_sq(x: &SampleSet, spec: &BaseKernelSpec) -> Result<f64> {
    set_kernel(x, x, spec)
}

/// Squared set distance with the raw (pre-clamp) value retained for debugging.
#[derive(Debug, Clone, Copy)]
pub struct SetDistanceSq {
    /// The distance, clamped to 0 when cancellation produced a tiny negative.
    pub value: f64,
    /// The unclamped three-term sum.
    pub raw: f64,
}

/// Squared RKHS distance between mapped sets:
/// `K(X, X) - 2 K(X, Y) + K(Y, Y)`, clamped to zero when floating-point
/// cancellation drives it (never below `-1e-12`) negative.
pub fn set_distance_sq(x: &SampleSet, y: &SampleSet, spec: &BaseKernelSpec) -> Result<f64> {
    set_distance_sq_detailed(x, y, spec).map(|d| d.value)
}

/// The three-term distance combination, compiled once so every caller rounds
/// identically.
#[inline(never)]
pub(crate) fn distance_combine(nx: f64, kxy: f64, ny: f64) -> f64 {
    nx - 2.0 * kxy + ny
}

/// As [`set_distance_sq`], also exposing the raw pre-clamp value.
pub fn set_distance_sq_detailed(
    x: &SampleSet,
    y: &SampleSet,
    spec: &BaseKernelSpec,
) -> Result<SetDistanceSq> {
    let nx = set_kernel(x, x, spec)?;
    let kxy = set_kernel(x, y, spec)?;
    let ny = set_kernel(y, y, spec)?;
    let raw = distance_combine(nx, kxy, ny);
    let value = if raw < 0.0 { 0.0 } else { raw };
    Ok(SetDistanceSq { value, raw })
}

/// Symmetric matrix of set-kernel values over a collection of sets.
///
/// Positive semidefinite (up to eigenvalue round-off) because the base kernel
/// is; the diagonal holds each set's squared norm.
#[derive(Debug, Clone)]
pub struct SetGram {
    values: DMatrix<f64>,
    kernel: BaseKernelSpec,
    source_ids: Vec<String>,
}

impl SetGram {
    pub(crate) fn from_parts(
        values: DMatrix<f64>,
        kernel: BaseKernelSpec,
        source_ids: Vec<String>,
    ) -> Self {
        debug_assert_eq!(values.nrows(), values.ncols());
        debug_assert_eq!(values.nrows(), source_ids.len());
        Self {
            values,
            kernel,
            source_ids,
        }
    }

    /// Number of sets (matrix is `size x size`).
    pub fn size(&self) -> usize {
        self.values.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn kernel(&self) -> &BaseKernelSpec {
        &self.kernel
    }

    pub fn source_ids(&self) -> &[String] {
        &self.source_ids
    }

    /// Writes the matrix as plain text: one row per line, space-separated,
    /// 17 significant digits (round-trips `f64` exactly).
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let n = self.size();
        for i in 0..n {
            for j in 0..n {
                if j > 0 {
                    write!(w, " ")?;
                }
                write!(w, "{:.16e}", self.values[(i, j)])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Reads a matrix written by [`write_text`](Self::write_text). The kernel
    /// spec is not part of the file and must be supplied by the caller; ids
    /// default to row indices.
    pub fn read_text<R: BufRead>(r: R, kernel: BaseKernelSpec) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>().map_err(|_| {
                        Error::FileFormat(format!("bad matrix entry at line {}", lineno + 1))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        let n = rows.len();
        if n == 0 {
            return Err(Error::FileFormat("empty gram file".into()));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::FileFormat(format!(
                "gram matrix must be square ({n} rows)"
            )));
        }
        let values = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (values[(i, j)], values[(j, i)]);
                if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::FileFormat(format!(
                        "gram entry ({i},{j}) breaks symmetry: {a} vs {b}"
                    )));
                }
            }
        }
        let source_ids = (0..n).map(|i| i.to_string()).collect();
        Ok(Self {
            values,
            kernel,
            source_ids,
        })
    }
}

/// The Gram matrix of set-kernel values: entry `(i, j)` is
/// `K(sets[i], sets[j])`. Only the upper triangle is computed; the lower is
/// mirrored.
pub fn set_gram(sets: &[SampleSet], spec: &BaseKernelSpec) -> Result<SetGram> {
    if sets.is_empty() {
        return Err(Error::EmptySet);
    }
    let dim = sets[0].dim();
    for s in sets {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: s.dim(),
            });
        }
    }
    let l = sets.len();
    let mut values = DMatrix::zeros(l, l);
    for i in 0..l {
        for j in i..l {
            let v = set_kernel(&sets[i], &sets[j], spec)?;
            values[(i, j)] = v;
            values[(j, i)] = v;
        }
    }
    let source_ids = sets
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.label()
                .map(str::to_owned)
                .unwrap_or_else(|| i.to_string())
        })
        .collect();
    Ok(SetGram::from_parts(values, *spec, source_ids))
}
