//! Synthetic Gaussian generators, expression-matrix CSV ingestion, and
//! train/leave-out splitting.
//!
//! All generators run on the crate's fixed ChaCha12 + Box-Muller pipeline
//! (see [`crate::rng`]); platform math-library samplers are never used, so
//! identical seeds reproduce identical data sets.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::{self, purpose, NormalSource};
use crate::set::SampleSet;

/// Draws `n` i.i.d. points from `N(mean, sigma^2 I)`.
pub fn sample_gaussian(mean: &[f64], sigma: f64, n: usize, seed: u64) -> Result<SampleSet> {
    if mean.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: 1,
            actual: 0,
        });
    }
    if n == 0 {
        return Err(Error::EmptySet);
    }
    if !(sigma >= 0.0) || !sigma.is_finite() || !mean.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let mut normals = NormalSource::from_seed(seed, purpose::GAUSSIAN);
    let points = (0..n)
        .map(|_| mean.iter().map(|m| m + sigma * normals.sample()).collect())
        .collect();
    SampleSet::new(points)
}

/// Whether CSV rows or columns hold the samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    SamplesAsRows,
    SamplesAsColumns,
}

/// A loaded numeric matrix plus the optional label column of the file.
///
/// Labels always describe the *file rows*; under `SamplesAsColumns` (where
/// the matrix is transposed so samples become rows) they therefore label the
/// returned columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvMatrix {
    pub rows: Vec<Vec<f64>>,
    pub labels: Option<Vec<String>>,
}

impl CsvMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.rows.first().map(|r| r.len()).unwrap_or(0)
    }
}

fn is_numeric(field: &str) -> bool {
    field.trim().parse::<f64>().is_ok()
}

/// Loads a comma-separated numeric matrix.
///
/// An optional single header line is auto-detected (any non-numeric field
/// after the first), as is an optional leading label column (non-numeric
/// first field of the first data row). The body must be rectangular and
/// finite.
pub fn load_matrix_csv(path: &Path, orientation: Orientation) -> Result<CsvMatrix> {
    let content = fs::read_to_string(path)?;
    parse_matrix_csv(&content, orientation)
}

pub(crate) fn parse_matrix_csv(content: &str, orientation: Orientation) -> Result<CsvMatrix> {
    let lines: Vec<(usize, &str)> = content
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    if lines.is_empty() {
        return Err(Error::FileFormat("empty csv file".into()));
    }

    // Header: the first line counts as a header when any field past the first
    // is non-numeric (a non-numeric first field alone means a label column).
    let first_fields: Vec<&str> = lines[0].1.split(',').collect();
    let has_header = first_fields.iter().skip(1).any(|f| !is_numeric(f))
        || (first_fields.len() == 1 && !is_numeric(first_fields[0]));
    let body = if has_header { &lines[1..] } else { &lines[..] };
    if body.is_empty() {
        return Err(Error::FileFormat(
            "csv has a header but no data rows".into(),
        ));
    }

    let has_labels = !is_numeric(body[0].1.split(',').next().unwrap_or(""));
    let expected_fields = body[0].1.split(',').count();

    let mut rows = Vec::with_capacity(body.len());
    let mut labels = if has_labels {
        Some(Vec::with_capacity(body.len()))
    } else {
        None
    };
    for &(lineno, line) in body {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expected_fields {
            return Err(Error::MalformedCsv { line: lineno });
        }
        let value_fields = if let Some(labels) = labels.as_mut() {
            labels.push(fields[0].trim().to_string());
            &fields[1..]
        } else {
            &fields[..]
        };
        let mut row = Vec::with_capacity(value_fields.len());
        for (k, field) in value_fields.iter().enumerate() {
            let column = if has_labels { k + 2 } else { k + 1 };
            let v: f64 = field.trim().parse().map_err(|_| Error::ParseError {
                line: lineno,
                column,
            })?;
            if !v.is_finite() {
                return Err(Error::NonFiniteInput);
            }
            row.push(v);
        }
        rows.push(row);
    }
    if rows[0].is_empty() {
        return Err(Error::FileFormat("csv has no numeric columns".into()));
    }

    let rows = match orientation {
        Orientation::SamplesAsRows => rows,
        Orientation::SamplesAsColumns => {
            let (r, c) = (rows.len(), rows[0].len());
            (0..c)
                .map(|j| (0..r).map(|i| rows[i][j]).collect())
                .collect()
        }
    };
    Ok(CsvMatrix { rows, labels })
}

/// Serializes rows as comma-separated values at 17 significant digits (exact
/// `f64` round-trip).
pub fn matrix_to_csv_string(rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            out.push_str(&format!("{v:.16e}"));
            first = false;
        }
        out.push('\n');
    }
    out
}

/// Writes a matrix CSV; refuses to overwrite unless `force` is set.
pub fn write_matrix_csv(path: &Path, rows: &[Vec<f64>], force: bool) -> Result<()> {
    if path.exists() && !force {
        return Err(Error::InvalidParameter(format!(
            "refusing to overwrite {} without force",
            path.display()
        )));
    }
    let mut f = fs::File::create(path)?;
    f.write_all(matrix_to_csv_string(rows).as_bytes())?;
    Ok(())
}

/// A train/leave-out/negative partition for one experiment.
#[derive(Debug, Clone)]
pub struct DatasetSplit {
    pub train_positive: SampleSet,
    pub leaveout_positive: SampleSet,
    pub test_negative: SampleSet,
    pub set_size: usize,
    pub seed: u64,
}

/// Splits the positive rows uniformly at random into disjoint train and
/// leave-out parts (`train_count + leaveout_count` must cover every positive
/// row, so the two parts partition the positives); negatives pass through.
pub fn split_dataset(
    positive: &[Vec<f64>],
    negative: &[Vec<f64>],
    train_count: usize,
    leaveout_count: usize,
    set_size: usize,
    seed: u64,
) -> Result<DatasetSplit> {
    if train_count + leaveout_count != positive.len() {
        return Err(Error::InsufficientData(format!(
            "split counts {train_count}+{leaveout_count} must partition the {} positive rows",
            positive.len()
        )));
    }
    if train_count == 0 {
        return Err(Error::InsufficientData(
            "training part must be non-empty".into(),
        ));
    }
    let mut split_rng = rng::stream(rng::derive_seed(seed, purpose::SPLIT), 0);
    let perm = rng::indices_without_replacement(&mut split_rng, positive.len(), positive.len());
    let take =
        |idx: &[usize]| -> Vec<Vec<f64>> { idx.iter().map(|&i| positive[i].clone()).collect() };
    let train_positive = SampleSet::new(take(&perm[..train_count]))?;
    let leaveout_positive = if leaveout_count > 0 {
        SampleSet::new(take(&perm[train_count..]))?
    } else {
        // no leave-out rows requested: reuse the training rows so the field
        // stays a valid set; callers treating type-I as undefined skip it
        train_positive.clone()
    };
    let test_negative = SampleSet::new(negative.to_vec())?;
    Ok(DatasetSplit {
        train_positive,
        leaveout_positive,
        test_negative,
        set_size,
        seed,
    })
}
