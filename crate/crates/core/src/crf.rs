//! Linear-chain CRF quantities over an emission lattice and a transition
//! matrix: log-partition, negative log-likelihood, marginals and analytic
//! gradients, plus the token-level cross-entropy loss for comparison.
//!
//! The sequence score is [`score_path`]; the normalizer sums `exp(score)`
//! over all `T^N` sequences, boundary transitions included. The forward
//! recursion runs left to right with a log-sum-exp over predecessors at
//! every cell.

use crate::decode::score_path;
use crate::error::{Error, Result};
use crate::lattice::EmissionLattice;
use crate::mask::{TransitionMask, TransitionMatrix};
use crate::scalar::{log_sum_exp, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct CrfParams<S> {
    raw: TransitionMatrix<S>,
    mask: Option<(TransitionMask, S)>,
    effective: TransitionMatrix<S>,
}

impl<S: Scalar> CrfParams<S> {
    pub fn new(transitions: TransitionMatrix<S>) -> Result<Self> {
        check_finite(&transitions)?;
        Ok(CrfParams {
            effective: transitions.clone(),
            raw: transitions,
            mask: None,
        })
    }

    /// A constrained CRF: entries the mask disallows are overridden with
    /// `illegal_score`, which must be finite (e.g. −1e4).
    pub fn constrained(
        transitions: TransitionMatrix<S>,
        mask: TransitionMask,
        illegal_score: S,
    ) -> Result<Self> {
        if !illegal_score.is_finite() {
            return Err(Error::InvalidScore(
                "CRF illegal-transition score must be finite".into(),
            ));
        }
        let effective = transitions.masked(&mask, illegal_score)?;
        check_finite(&effective)?;
        Ok(CrfParams {
            raw: transitions,
            mask: Some((mask, illegal_score)),
            effective,
        })
    }

    pub fn zeros(num_tags: usize) -> Self {
        Self::new(TransitionMatrix::zeros(num_tags)).expect("zeros are finite")
    }

    /// Transition scores actually used, mask applied.
    pub fn transitions(&self) -> &TransitionMatrix<S> {
        &self.effective
    }

    pub fn raw_transitions(&self) -> &TransitionMatrix<S> {
        &self.raw
    }

    pub fn mask(&self) -> Option<&TransitionMask> {
        self.mask.as_ref().map(|(m, _)| m)
    }

    pub fn num_tags(&self) -> usize {
        self.effective.num_tags()
    }
}

fn check_finite<S: Scalar>(m: &TransitionMatrix<S>) -> Result<()> {
    if m.as_slice().iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidScore(
            "CRF transitions must be finite; use a large negative value for illegal entries".into(),
        ));
    }
    Ok(())
}

fn check_dims<S: Scalar>(lattice: &EmissionLattice<S>, params: &CrfParams<S>) -> Result<()> {
    if lattice.num_tags() != params.num_tags() {
        return Err(Error::Shape(format!(
            "lattice has {} tags but CRF transitions cover {}",
            lattice.num_tags(),
            params.num_tags()
        )));
    }
    Ok(())
}

/// Forward scores: `alpha[i*T + t]` = log Σ over prefixes ending in `t` at `i`.
fn forward<S: Scalar>(lattice: &EmissionLattice<S>, tr: &TransitionMatrix<S>) -> (Vec<S>, S) {
    let (n, t) = (lattice.len(), lattice.num_tags());
    let go = tr.go_index();
    let eos = tr.eos_index();
    let mut alpha = vec![S::zero(); n * t];
    let mut scratch = vec![S::zero(); t];
    for (y, a) in alpha.iter_mut().take(t).enumerate() {
        *a = tr.get(go, y) + lattice.get(0, y);
    }
    for i in 1..n {
        for y in 0..t {
            for (f, s) in scratch.iter_mut().enumerate() {
                *s = alpha[(i - 1) * t + f] + tr.get(f, y);
            }
            alpha[i * t + y] = log_sum_exp(&scratch) + lattice.get(i, y);
        }
    }
    for (f, s) in scratch.iter_mut().enumerate() {
        *s = alpha[(n - 1) * t + f] + tr.get(f, eos);
    }
    let log_z = log_sum_exp(&scratch);
    (alpha, log_z)
}

/// Backward scores: `beta[i*T + t]` = log Σ over suffixes after `i` given `y_i = t`.
fn backward<S: Scalar>(lattice: &EmissionLattice<S>, tr: &TransitionMatrix<S>) -> Vec<S> {
    let (n, t) = (lattice.len(), lattice.num_tags());
    let eos = tr.eos_index();
    let mut beta = vec![S::zero(); n * t];
    let mut scratch = vec![S::zero(); t];
    for y in 0..t {
        beta[(n - 1) * t + y] = tr.get(y, eos);
    }
    for i in (0..n - 1).rev() {
        for y in 0..t {
            for (u, s) in scratch.iter_mut().enumerate() {
                *s = tr.get(y, u) + lattice.get(i + 1, u) + beta[(i + 1) * t + u];
            }
            beta[i * t + y] = log_sum_exp(&scratch);
        }
    }
    beta
}

/// log Σ_y exp(score(y)) over every tag sequence.
pub fn log_partition<S: Scalar>(lattice: &EmissionLattice<S>, params: &CrfParams<S>) -> Result<S> {
    check_dims(lattice, params)?;
    Ok(forward(lattice, params.transitions()).1)
}

/// −log P(gold | lattice) = log Z − score(gold).
pub fn crf_nll<S: Scalar>(
    lattice: &EmissionLattice<S>,
    params: &CrfParams<S>,
    gold: &[usize],
) -> Result<S> {
    check_dims(lattice, params)?;
    let gold_score = score_path(lattice, params.transitions(), gold)?;
    Ok(forward(lattice, params.transitions()).1 - gold_score)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Marginals<S> {
    len: usize,
    num_tags: usize,
    unary: Vec<S>,
    pairwise: Vec<S>,
    pub log_partition: S,
}

impl<S: Scalar> Marginals<S> {
    /// P(y_i = tag).
    pub fn unary(&self, i: usize, tag: usize) -> S {
        self.unary[i * self.num_tags + tag]
    }

    /// P(y_i = from, y_{i+1} = to), for `i < len - 1`.
    pub fn pairwise(&self, i: usize, from: usize, to: usize) -> S {
        let t = self.num_tags;
        self.pairwise[(i * t + from) * t + to]
    }

    pub fn unary_row(&self, i: usize) -> &[S] {
        &self.unary[i * self.num_tags..(i + 1) * self.num_tags]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn num_tags(&self) -> usize {
        self.num_tags
    }
}

/// Unary and pairwise posterior marginals under the CRF distribution.
pub fn forward_backward<S: Scalar>(
    lattice: &EmissionLattice<S>,
    params: &CrfParams<S>,
) -> Result<Marginals<S>> {
    check_dims(lattice, params)?;
    let tr = params.transitions();
    let (n, t) = (lattice.len(), lattice.num_tags());
    let (alpha, log_z) = forward(lattice, tr);
    let beta = backward(lattice, tr);

    let unary = alpha
        .iter()
        .zip(&beta)
        .map(|(&a, &b)| (a + b - log_z).exp())
        .collect();
    let mut pairwise = Vec::with_capacity(n.saturating_sub(1) * t * t);
    for i in 0..n.saturating_sub(1) {
        for f in 0..t {
            for y in 0..t {
                let s =
                    alpha[i * t + f] + tr.get(f, y) + lattice.get(i + 1, y) + beta[(i + 1) * t + y];
                pairwise.push((s - log_z).exp());
            }
        }
    }
    Ok(Marginals {
        len: n,
        num_tags: t,
        unary,
        pairwise,
        log_partition: log_z,
    })
}

/// Gradients of [`crf_nll`] with respect to the emissions and the
/// effective transition matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CrfGradients<S> {
    /// `N×T`: unary marginals minus the one-hot gold labels.
    pub d_emissions: Vec<Vec<S>>,
    /// `(T+2)×(T+2)`: expected minus observed transition counts, boundaries included.
    pub d_transitions: Vec<Vec<S>>,
}

/// Expected minus observed feature counts. Entries the mask overrides are
/// reported like any other; callers holding the mask fixed should zero them.
pub fn crf_nll_gradients<S: Scalar>(
    lattice: &EmissionLattice<S>,
    params: &CrfParams<S>,
    gold: &[usize],
) -> Result<CrfGradients<S>> {
    lattice.check_path(gold)?;
    let marg = forward_backward(lattice, params)?;
    let (n, t) = (lattice.len(), lattice.num_tags());
    let (go, eos) = (t, t + 1);

    let d_emissions = (0..n)
        .map(|i| {
            (0..t)
                .map(|y| marg.unary(i, y) - if gold[i] == y { S::one() } else { S::zero() })
                .collect()
        })
        .collect();

    let mut d_tr = vec![vec![S::zero(); t + 2]; t + 2];
    d_tr[go][..t].copy_from_slice(marg.unary_row(0));
    for (y, row) in d_tr.iter_mut().take(t).enumerate() {
        row[eos] = marg.unary(n - 1, y);
    }
    for i in 0..n - 1 {
        for (f, row) in d_tr.iter_mut().take(t).enumerate() {
            for (y, cell) in row.iter_mut().take(t).enumerate() {
                *cell = *cell + marg.pairwise(i, f, y);
            }
        }
    }
    d_tr[go][gold[0]] = d_tr[go][gold[0]] - S::one();
    for w in gold.windows(2) {
        d_tr[w[0]][w[1]] = d_tr[w[0]][w[1]] - S::one();
    }
    d_tr[gold[n - 1]][eos] = d_tr[gold[n - 1]][eos] - S::one();

    Ok(CrfGradients {
        d_emissions,
        d_transitions: d_tr,
    })
}

/// Σ_i −log softmax(scores[i])[gold_i]; no transition terms.
pub fn token_cross_entropy<S: Scalar>(lattice: &EmissionLattice<S>, gold: &[usize]) -> Result<S> {
    lattice.check_path(gold)?;
    Ok(lattice.rows().zip(gold).fold(S::zero(), |acc, (row, &g)| {
        acc + (log_sum_exp(row) - row[g])
    }))
}
