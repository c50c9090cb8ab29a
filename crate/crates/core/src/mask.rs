//! Transition legality masks and the score matrices built from them.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::scheme::{is_legal_transition, parse_tag, Scheme, Tag};
use crate::vocab::TagVocabulary;

/// Score used for illegal transitions when the matrix feeds CRF computations.
pub const CRF_ILLEGAL_SCORE: f64 = -1e4;

/// `(T+2)×(T+2)` legality table, `allowed(from, to)`, over real tags plus
/// the `GO` (index `T`) and `EOS` (index `T+1`) boundaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionMask {
    scheme: Scheme,
    num_tags: usize,
    allowed: Vec<bool>,
}

impl TransitionMask {
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn num_tags(&self) -> usize {
        self.num_tags
    }

    pub fn size(&self) -> usize {
        self.num_tags + 2
    }

    pub fn go_index(&self) -> usize {
        self.num_tags
    }

    pub fn eos_index(&self) -> usize {
        self.num_tags + 1
    }

    pub fn allowed(&self, from: usize, to: usize) -> bool {
        self.allowed[from * self.size() + to]
    }

    /// Number of allowed entries between real tags.
    pub fn count_real_allowed(&self) -> usize {
        (0..self.num_tags)
            .flat_map(|f| (0..self.num_tags).map(move |t| (f, t)))
            .filter(|&(f, t)| self.allowed(f, t))
            .count()
    }

    /// All allowed `(from, to)` pairs, boundaries included.
    pub fn allowed_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.size();
        (0..n)
            .flat_map(|f| (0..n).map(move |t| (f, t)))
            .filter(|&(f, t)| self.allowed(f, t))
            .collect()
    }

    fn check_invariants(&self) -> Result<()> {
        let t = self.num_tags;
        if t == 0 {
            return Err(Error::DeadEnd("vocabulary has no labels".into()));
        }
        if (0..t).all(|to| !self.allowed(self.go_index(), to)) {
            return Err(Error::DeadEnd("no label may start a sentence".into()));
        }
        if let Some(f) = (0..t).find(|&f| (0..t).all(|to| !self.allowed(f, to))) {
            return Err(Error::DeadEnd(format!("tag {f} has no legal successor")));
        }
        // Every sentence length must admit a complete path. The sets of
        // tags reachable after n steps are eventually periodic, so walking
        // them until one repeats covers every length.
        let mut reachable: Vec<bool> = (0..t).map(|to| self.allowed(self.go_index(), to)).collect();
        let mut seen = HashSet::new();
        let mut steps = 1;
        while seen.insert(reachable.clone()) {
            let can_end = (0..t).any(|f| reachable[f] && self.allowed(f, self.eos_index()));
            if !can_end {
                return Err(Error::DeadEnd(format!(
                    "no legal sequence of length {steps} exists"
                )));
            }
            reachable = (0..t)
                .map(|to| (0..t).any(|f| reachable[f] && self.allowed(f, to)))
                .collect();
            steps += 1;
        }
        Ok(())
    }
}

/// Builds the legality mask for `vocab` under `scheme`.
///
/// Fails if the resulting graph has a dead end, i.e. some sentence length
/// has no legal path from `GO` to `EOS`, or a real tag has no real successor.
pub fn build_transition_mask(scheme: Scheme, vocab: &TagVocabulary) -> Result<TransitionMask> {
    let mut tags = vocab
        .labels()
        .iter()
        .map(|l| parse_tag(l, scheme))
        .collect::<Result<Vec<Tag>>>()?;
    tags.push(Tag::go());
    tags.push(Tag::eos());

    let allowed = tags
        .iter()
        .flat_map(|from| {
            tags.iter()
                .map(move |to| is_legal_transition(scheme, from, to))
        })
        .collect();
    let mask = TransitionMask {
        scheme,
        num_tags: vocab.len(),
        allowed,
    };
    mask.check_invariants()?;
    Ok(mask)
}

/// Dense `(T+2)×(T+2)` transition scores, row = from, column = to.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix<S> {
    num_tags: usize,
    scores: Vec<S>,
}

impl<S: Scalar> TransitionMatrix<S> {
    pub fn zeros(num_tags: usize) -> Self {
        let n = num_tags + 2;
        TransitionMatrix {
            num_tags,
            scores: vec![S::zero(); n * n],
        }
    }

    /// Row-major scores over `T+2` rows. Entries may be −∞ but not NaN or +∞.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::Shape(format!(
                "transition matrix needs at least 2 rows, got {n}"
            )));
        }
        let mut scores = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Shape(format!(
                    "transition row {i} has {} columns, expected {n}",
                    row.len()
                )));
            }
            scores.extend(row);
        }
        Self::from_flat(n - 2, scores)
    }

    pub fn from_flat(num_tags: usize, scores: Vec<S>) -> Result<Self> {
        let n = num_tags + 2;
        if scores.len() != n * n {
            return Err(Error::Shape(format!(
                "expected {} transition scores, got {}",
                n * n,
                scores.len()
            )));
        }
        if let Some(bad) = scores.iter().find(|s| s.is_nan() || *s == &S::infinity()) {
            return Err(Error::InvalidScore(format!("transition score {bad}")));
        }
        Ok(TransitionMatrix { num_tags, scores })
    }

    pub fn num_tags(&self) -> usize {
        self.num_tags
    }

    pub fn size(&self) -> usize {
        self.num_tags + 2
    }

    pub fn go_index(&self) -> usize {
        self.num_tags
    }

    pub fn eos_index(&self) -> usize {
        self.num_tags + 1
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> S {
        self.scores[from * (self.num_tags + 2) + to]
    }

    pub fn set(&mut self, from: usize, to: usize, value: S) {
        let n = self.size();
        self.scores[from * n + to] = value;
    }

    pub fn as_slice(&self) -> &[S] {
        &self.scores
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        self.scores.chunks(self.size()).map(<[S]>::to_vec).collect()
    }

    pub fn has_neg_infinity(&self) -> bool {
        self.scores.iter().any(|s| *s == S::neg_infinity())
    }

    /// Copy of `self` with every entry the mask disallows replaced by
    /// `illegal_score`.
    pub fn masked(&self, mask: &TransitionMask, illegal_score: S) -> Result<Self> {
        check_illegal_score(illegal_score)?;
        if mask.num_tags() != self.num_tags {
            return Err(Error::Shape(format!(
                "mask covers {} tags, matrix covers {}",
                mask.num_tags(),
                self.num_tags
            )));
        }
        let mut out = self.clone();
        for (i, allowed) in mask.allowed.iter().enumerate() {
            if !allowed {
                out.scores[i] = illegal_score;
            }
        }
        Ok(out)
    }
}

fn check_illegal_score<S: Scalar>(score: S) -> Result<()> {
    if score.is_nan() || score >= S::zero() {
        return Err(Error::InvalidScore(format!(
            "illegal-transition score must be negative, got {score}"
        )));
    }
    Ok(())
}

/// Turns a legality mask into transition scores: 0 where allowed,
/// `illegal_score` elsewhere. Use a large finite value (see
/// [`CRF_ILLEGAL_SCORE`]) for CRF math and −∞ for pure decoding.
pub fn mask_to_scores<S: Scalar>(
    mask: &TransitionMask,
    illegal_score: S,
) -> Result<TransitionMatrix<S>> {
    TransitionMatrix::zeros(mask.num_tags()).masked(mask, illegal_score)
}
