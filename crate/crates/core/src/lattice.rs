use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Per-token, per-tag emission scores for one sentence, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmissionLattice<S> {
    len: usize,
    num_tags: usize,
    scores: Vec<S>,
}

impl<S: Scalar> EmissionLattice<S> {
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let len = rows.len();
        let num_tags = rows.first().map_or(0, Vec::len);
        let mut scores = Vec::with_capacity(len * num_tags);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != num_tags {
                return Err(Error::Shape(format!(
                    "lattice row {i} has {} scores, expected {num_tags}",
                    row.len()
                )));
            }
            scores.extend(row);
        }
        Self::from_flat(len, num_tags, scores)
    }

    pub fn from_flat(len: usize, num_tags: usize, scores: Vec<S>) -> Result<Self> {
        if len == 0 || num_tags == 0 {
            return Err(Error::Shape(format!(
                "lattice must be non-empty, got {len}x{num_tags}"
            )));
        }
        if scores.len() != len * num_tags {
            return Err(Error::Shape(format!(
                "expected {} scores for a {len}x{num_tags} lattice, got {}",
                len * num_tags,
                scores.len()
            )));
        }
        if let Some(pos) = scores.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidScore(format!(
                "non-finite emission at token {}, tag {}",
                pos / num_tags,
                pos % num_tags
            )));
        }
        Ok(EmissionLattice {
            len,
            num_tags,
            scores,
        })
    }

    pub fn zeros(len: usize, num_tags: usize) -> Result<Self> {
        Self::from_flat(len, num_tags, vec![S::zero(); len * num_tags])
    }

    /// Number of tokens.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn num_tags(&self) -> usize {
        self.num_tags
    }

    #[inline]
    pub fn get(&self, token: usize, tag: usize) -> S {
        self.scores[token * self.num_tags + tag]
    }

    pub fn set(&mut self, token: usize, tag: usize, value: S) {
        assert!(value.is_finite(), "emission scores must be finite");
        self.scores[token * self.num_tags + tag] = value;
    }

    #[inline]
    pub fn row(&self, token: usize) -> &[S] {
        &self.scores[token * self.num_tags..(token + 1) * self.num_tags]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[S]> {
        self.scores.chunks(self.num_tags)
    }

    pub(crate) fn check_path(&self, path: &[usize]) -> Result<()> {
        if path.len() != self.len {
            return Err(Error::Shape(format!(
                "path has {} tags for a lattice of {} tokens",
                path.len(),
                self.len
            )));
        }
        if let Some(&index) = path.iter().find(|&&t| t >= self.num_tags) {
            return Err(Error::IndexOutOfRange {
                index,
                num_tags: self.num_tags,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_checks_shape_and_values() {
        let l = EmissionLattice::from_rows(vec![vec![1.0f64, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!((l.len(), l.num_tags()), (2, 2));
        assert_eq!(l.get(1, 0), 3.0);
        assert_eq!(l.row(0), &[1.0, 2.0]);

        assert!(EmissionLattice::<f64>::from_rows(vec![]).is_err());
        assert!(EmissionLattice::from_rows(vec![vec![1.0f64], vec![1.0, 2.0]]).is_err());
        assert!(EmissionLattice::from_rows(vec![vec![f64::NEG_INFINITY]]).is_err());
        assert!(EmissionLattice::from_rows(vec![vec![f64::NAN]]).is_err());
        assert!(EmissionLattice::<f32>::from_flat(1, 2, vec![0.0]).is_err());
    }

    #[test]
    fn path_checks() {
        let l = EmissionLattice::<f64>::zeros(2, 3).unwrap();
        assert!(l.check_path(&[0, 2]).is_ok());
        assert!(matches!(l.check_path(&[0]), Err(Error::Shape(_))));
        assert!(matches!(
            l.check_path(&[0, 3]),
            Err(Error::IndexOutOfRange { index: 3, .. })
        ));
    }
}
