//! Feature matrices and the labeled / paired views built on them.

use crate::error::{Error, Result};

/// `n x d` row-major feature matrix with optional integer labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    features: Vec<f64>,
    rows: usize,
    cols: usize,
    labels: Option<Vec<i32>>,
}

impl SampleSet {
    pub fn new(features: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!(
                "sample set must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if features.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: features.len(),
            });
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols + 1,
                column: pos % cols + 1,
            });
        }
        Ok(SampleSet {
            features,
            rows,
            cols,
            labels: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::RaggedRow {
                row: i + 1,
                expected: cols,
                found: r.len(),
            });
        }
        Self::new(rows.concat(), rows.len(), cols)
    }

    pub fn with_labels(mut self, labels: Vec<i32>) -> Result<Self> {
        if labels.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.features.chunks_exact(self.cols)
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn labels(&self) -> Option<&[i32]> {
        self.labels.as_deref()
    }

    /// Rows of `self` followed by rows of `other`. Labels are dropped.
    pub fn concat(&self, other: &SampleSet) -> Result<SampleSet> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.cols,
            });
        }
        let mut features = self.features.clone();
        features.extend_from_slice(&other.features);
        SampleSet::new(features, self.rows + other.rows, self.cols)
    }

    /// Column means.
    pub fn mean(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.cols];
        for row in self.iter_rows() {
            acc.iter_mut().zip(row).for_each(|(a, x)| *a += x);
        }
        acc.iter_mut().for_each(|a| *a /= self.rows as f64);
        acc
    }
}

/// Features with binary origin targets: 1 for the reference set, 0 for the
/// compared set.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledTrainSet {
    features: Vec<f64>,
    cols: usize,
    targets: Vec<u8>,
}

impl LabeledTrainSet {
    pub fn new(features: Vec<f64>, cols: usize, targets: Vec<u8>) -> Result<Self> {
        if cols == 0 {
            return Err(Error::invalid("feature dimension must be positive"));
        }
        if features.len() != targets.len() * cols {
            return Err(Error::DimensionMismatch {
                expected: targets.len() * cols,
                found: features.len(),
            });
        }
        if targets.iter().any(|t| *t > 1) {
            return Err(Error::invalid("targets must be 0 or 1"));
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols + 1,
                column: pos % cols + 1,
            });
        }
        Ok(LabeledTrainSet {
            features,
            cols,
            targets,
        })
    }

    /// Stacks `real` (target 1) above `fake` (target 0).
    pub fn from_sets(real: &SampleSet, fake: &SampleSet) -> Result<Self> {
        let stacked = real.concat(fake)?;
        let mut targets = vec![1u8; real.rows()];
        targets.resize(real.rows() + fake.rows(), 0);
        Self::new(stacked.features, stacked.cols, targets)
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.cols..(i + 1) * self.cols]
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn targets(&self) -> &[u8] {
        &self.targets
    }

    pub fn count_of(&self, target: u8) -> usize {
        self.targets.iter().filter(|t| **t == target).count()
    }
}

/// `n` pairs `(X_i, Y_i)`: reference samples alongside compared samples.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedDataset {
    real: SampleSet,
    fake: SampleSet,
}

impl PairedDataset {
    pub fn new(real: SampleSet, fake: SampleSet) -> Result<Self> {
        if real.rows() != fake.rows() {
            return Err(Error::invalid(format!(
                "paired sets need equal sizes, got {} and {}",
                real.rows(),
                fake.rows()
            )));
        }
        if real.cols() != fake.cols() {
            return Err(Error::DimensionMismatch {
                expected: real.cols(),
                found: fake.cols(),
            });
        }
        Ok(PairedDataset { real, fake })
    }

    pub fn real(&self) -> &SampleSet {
        &self.real
    }

    pub fn fake(&self) -> &SampleSet {
        &self.fake
    }

    pub fn len(&self) -> usize {
        self.real.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.real.rows() == 0
    }

    pub fn dim(&self) -> usize {
        self.real.cols()
    }

    /// Same pairs with the roles of the two sets exchanged.
    pub fn swapped(&self) -> Self {
        PairedDataset {
            real: self.fake.clone(),
            fake: self.real.clone(),
        }
    }

    pub fn into_parts(self) -> (SampleSet, SampleSet) {
        (self.real, self.fake)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_set_checks() {
        assert!(SampleSet::new(vec![], 0, 2).is_err());
        assert!(SampleSet::new(vec![1.0, 2.0, 3.0], 2, 2).is_err());
        let err = SampleSet::new(vec![1.0, 2.0, f64::NAN, 4.0], 2, 2).unwrap_err();
        assert!(matches!(err, Error::NonFinite { row: 2, column: 1 }));
        let err = SampleSet::from_rows(&[vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert!(matches!(err, Error::RaggedRow { row: 2, .. }));
    }

    #[test]
    fn concat_and_mean() {
        let a = SampleSet::from_rows(&[vec![0.0, 2.0]]).unwrap();
        let b = SampleSet::from_rows(&[vec![2.0, 4.0]]).unwrap();
        let c = a.concat(&b).unwrap();
        assert_eq!(c.rows(), 2);
        assert_eq!(c.mean(), vec![1.0, 3.0]);
    }

    #[test]
    fn paired_requires_equal_shapes() {
        let a = SampleSet::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let b = SampleSet::from_rows(&[vec![0.0]]).unwrap();
        assert!(PairedDataset::new(a.clone(), b).is_err());
        assert!(PairedDataset::new(a.clone(), a).is_ok());
    }
}
