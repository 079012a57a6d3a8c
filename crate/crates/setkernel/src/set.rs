//! Sample sets: ordered collections of equal-dimension vectors treated as one
//! point in the RKHS of sets.

use crate::error::{Error, Result};

/// An ordered, non-empty collection of `d`-dimensional real vectors.
///
/// Stored as a list but carrying multiset semantics: duplicates are allowed
/// and every operation built on top is invariant to point order (up to
/// floating-point reassociation).
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    points: Vec<Vec<f64>>,
    label: Option<String>,
}

impl SampleSet {
    /// Validates and wraps a collection of points: at least one point, all of
    /// the same dimension, all coordinates finite.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySet);
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                actual: 0,
            });
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: p.len(),
                });
            }
            if !p.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFiniteInput);
            }
        }
        Ok(Self {
            points,
            label: None,
        })
    }

    pub fn with_label(points: Vec<Vec<f64>>, label: impl Into<String>) -> Result<Self> {
        let mut s = Self::new(points)?;
        s.label = Some(label.into());
        Ok(s)
    }

    /// Number of points `n`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the constructor rejects empty collections
    }

    /// Dimension `d` shared by every point.
    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = Some(label.into());
    }

    /// The sub(multi)set at the given indices, in index order.
    pub fn subset(&self, indices: &[usize]) -> Result<SampleSet> {
        if indices.is_empty() {
            return Err(Error::EmptySet);
        }
        let points = indices
            .iter()
            .map(|&i| self.points[i].clone())
            .collect::<Vec<_>>();
        SampleSet::new(points)
    }

    pub fn into_points(self) -> Vec<Vec<f64>> {
        self.points
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_ragged_and_non_finite() {
        assert!(matches!(SampleSet::new(vec![]), Err(Error::EmptySet)));
        assert!(matches!(
            SampleSet::new(vec![vec![1.0], vec![1.0, 2.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            SampleSet::new(vec![vec![f64::INFINITY]]),
            Err(Error::NonFiniteInput)
        ));
        assert!(SampleSet::new(vec![vec![]]).is_err());
    }

    #[test]
    fn subset_preserves_rows() {
        let s = SampleSet::new(vec![vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let sub = s.subset(&[2, 0]).unwrap();
        assert_eq!(sub.points(), &[vec![3.0], vec![1.0]]);
        assert!(s.subset(&[]).is_err());
    }
}
