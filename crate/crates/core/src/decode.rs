//! Best-path decoding over an emission lattice.
//!
//! All scores live in log space. A transition score of −∞ excludes the
//! transition outright, so a path is legal iff its score is finite.
//!
//! Ties are broken toward the lower tag index, position by position from
//! the left, so among equally scoring paths the lexicographically first
//! one is returned. To make that rule exact the dynamic program runs
//! right to left (best completion score of every cell) and the path is
//! then read off left to right.

use crate::error::{Error, Result};
use crate::lattice::EmissionLattice;
use crate::mask::{mask_to_scores, TransitionMask, TransitionMatrix};
use crate::scalar::{argmax, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct DecodedPath<S> {
    pub tag_indices: Vec<usize>,
    /// Emissions plus transitions along the path, `GO` and `EOS` included.
    pub path_score: S,
}

fn check_dims<S: Scalar>(
    lattice: &EmissionLattice<S>,
    transitions: &TransitionMatrix<S>,
) -> Result<()> {
    if lattice.num_tags() != transitions.num_tags() {
        return Err(Error::Shape(format!(
            "lattice has {} tags but transitions cover {}",
            lattice.num_tags(),
            transitions.num_tags()
        )));
    }
    Ok(())
}

/// Score of `path`: Σ emissions + Σ transitions, including `GO→y₀` and
/// `y_{N-1}→EOS`. Summed left to right, transition before emission at
/// each token, so results are bit-reproducible.
pub fn score_path<S: Scalar>(
    lattice: &EmissionLattice<S>,
    transitions: &TransitionMatrix<S>,
    path: &[usize],
) -> Result<S> {
    check_dims(lattice, transitions)?;
    lattice.check_path(path)?;
    Ok(score_path_unchecked(lattice, transitions, path))
}

fn score_path_unchecked<S: Scalar>(
    lattice: &EmissionLattice<S>,
    transitions: &TransitionMatrix<S>,
    path: &[usize],
) -> S {
    let mut prev = transitions.go_index();
    let mut score = S::zero();
    for (i, &tag) in path.iter().enumerate() {
        score = score + transitions.get(prev, tag) + lattice.get(i, tag);
        prev = tag;
    }
    score + transitions.get(prev, transitions.eos_index())
}

/// Independent per-token argmax; the score uses a zero transition matrix.
pub fn greedy_decode<S: Scalar>(lattice: &EmissionLattice<S>) -> DecodedPath<S> {
    let mut score = S::zero();
    let tag_indices = lattice
        .rows()
        .map(|row| {
            let best = argmax(row).expect("lattice rows are non-empty");
            score = score + row[best];
            best
        })
        .collect();
    DecodedPath {
        tag_indices,
        path_score: score,
    }
}

/// Reusable buffers for [`viterbi`].
#[derive(Debug, Default)]
pub struct ViterbiWorkspace<S> {
    completion: Vec<S>,
    candidates: Vec<S>,
}

impl<S: Scalar> ViterbiWorkspace<S> {
    pub fn new() -> Self {
        ViterbiWorkspace {
            completion: Vec::new(),
            candidates: Vec::new(),
        }
    }

    pub fn decode(
        &mut self,
        lattice: &EmissionLattice<S>,
        transitions: &TransitionMatrix<S>,
    ) -> Result<DecodedPath<S>> {
        check_dims(lattice, transitions)?;
        let (n, t) = (lattice.len(), lattice.num_tags());
        let eos = transitions.eos_index();

        // completion[i*t + y]: best score of tokens i.. given y_i = y,
        // including the emission at i and the final EOS transition.
        self.completion.clear();
        self.completion.resize(n * t, S::neg_infinity());
        for y in 0..t {
            self.completion[(n - 1) * t + y] = lattice.get(n - 1, y) + transitions.get(y, eos);
        }
        for i in (0..n - 1).rev() {
            let (head, tail) = self.completion.split_at_mut((i + 1) * t);
            let next = &tail[..t];
            let cur = &mut head[i * t..];
            for (y, cell) in cur.iter_mut().enumerate() {
                let mut best = S::neg_infinity();
                for (u, &rest) in next.iter().enumerate() {
                    let v = transitions.get(y, u) + rest;
                    if v > best {
                        best = v;
                    }
                }
                *cell = best + lattice.get(i, y);
            }
        }

        let mut path = Vec::with_capacity(n);
        let mut prev = transitions.go_index();
        self.candidates.resize(t, S::zero());
        for i in 0..n {
            let row = &self.completion[i * t..(i + 1) * t];
            for (u, c) in self.candidates.iter_mut().enumerate() {
                *c = transitions.get(prev, u) + row[u];
            }
            let best = argmax(&self.candidates).expect("at least one tag");
            if self.candidates[best] == S::neg_infinity() {
                return Err(Error::NoLegalPath);
            }
            path.push(best);
            prev = best;
        }

        let path_score = score_path_unchecked(lattice, transitions, &path);
        Ok(DecodedPath {
            tag_indices: path,
            path_score,
        })
    }
}

/// Highest-scoring tag sequence under `transitions`.
pub fn viterbi<S: Scalar>(
    lattice: &EmissionLattice<S>,
    transitions: &TransitionMatrix<S>,
) -> Result<DecodedPath<S>> {
    ViterbiWorkspace::new().decode(lattice, transitions)
}

/// Viterbi with the legality mask as the transition matrix: allowed
/// transitions score 0 and illegal ones −∞.
pub fn constrained_decode<S: Scalar>(
    lattice: &EmissionLattice<S>,
    mask: &TransitionMask,
) -> Result<DecodedPath<S>> {
    if mask.num_tags() != lattice.num_tags() {
        return Err(Error::Shape(format!(
            "lattice has {} tags but the mask covers {}",
            lattice.num_tags(),
            mask.num_tags()
        )));
    }
    viterbi(lattice, &mask_to_scores(mask, S::neg_infinity())?)
}
