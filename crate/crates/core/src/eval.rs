//! Entity-level precision, recall and F1 over exact span matches.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::ops::AddAssign;

use serde::Serialize;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::spans::{extract_spans, Span};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

impl AddAssign for Counts {
    fn add_assign(&mut self, rhs: Counts) {
        self.true_positives += rhs.true_positives;
        self.false_positives += rhs.false_positives;
        self.false_negatives += rhs.false_negatives;
    }
}

impl Counts {
    pub fn predicted(&self) -> usize {
        self.true_positives + self.false_positives
    }

    pub fn gold(&self) -> usize {
        self.true_positives + self.false_negatives
    }

    pub fn scores(&self) -> Scores {
        let ratio = |num: usize, den: usize| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let precision = ratio(self.true_positives, self.predicted());
        let recall = ratio(self.true_positives, self.gold());
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Scores {
            counts: *self,
            precision,
            recall,
            f1,
        }
    }
}

/// Counts plus derived ratios in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scores {
    #[serde(flatten)]
    pub counts: Counts,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub tokens: usize,
    pub overall: Scores,
    pub per_type: BTreeMap<String, Scores>,
}

/// Per-type counts for one sentence.
pub fn sentence_counts(gold: &[Span], pred: &[Span]) -> BTreeMap<String, Counts> {
    let gold_set: HashSet<&Span> = gold.iter().collect();
    let pred_set: HashSet<&Span> = pred.iter().collect();
    let mut counts: BTreeMap<String, Counts> = BTreeMap::new();
    for s in &gold_set {
        let c = counts.entry(s.entity_type.clone()).or_default();
        if pred_set.contains(s) {
            c.true_positives += 1;
        } else {
            c.false_negatives += 1;
        }
    }
    for s in pred_set.difference(&gold_set) {
        counts
            .entry(s.entity_type.clone())
            .or_default()
            .false_positives += 1;
    }
    counts
}

/// Compares predicted against gold entities sentence by sentence.
///
/// Both corpora must have the same number of sentences with matching
/// lengths; tokens themselves are not compared.
pub fn entity_f1(gold: &Corpus, pred: &Corpus) -> Result<EvalReport> {
    if gold.len() != pred.len() {
        return Err(Error::Shape(format!(
            "gold has {} sentences but prediction has {}; first differing sentence is {}",
            gold.len(),
            pred.len(),
            gold.len().min(pred.len()) + 1
        )));
    }
    let mut per_type: BTreeMap<String, Counts> = BTreeMap::new();
    for (k, (g, p)) in gold.sentences().iter().zip(pred.sentences()).enumerate() {
        if g.len() != p.len() {
            return Err(Error::Shape(format!(
                "sentence {}: gold has {} tokens but prediction has {}",
                k + 1,
                g.len(),
                p.len()
            )));
        }
        let gs = extract_spans(&g.labels, gold.scheme())?;
        let ps = extract_spans(&p.labels, pred.scheme())?;
        for (ty, c) in sentence_counts(&gs, &ps) {
            *per_type.entry(ty).or_default() += c;
        }
    }
    let mut overall = Counts::default();
    for c in per_type.values() {
        overall += *c;
    }
    Ok(EvalReport {
        tokens: gold.num_tokens(),
        overall: overall.scores(),
        per_type: per_type.into_iter().map(|(k, c)| (k, c.scores())).collect(),
    })
}

impl EvalReport {
    /// Human-readable table with percentages to two decimals.
    pub fn to_table(&self) -> String {
        let width = self
            .per_type
            .keys()
            .map(|k| k.chars().count())
            .max()
            .unwrap_or(0)
            .max(7);
        let mut out = String::new();
        let o = &self.overall;
        let _ = writeln!(
            out,
            "processed {} tokens with {} phrases; found: {} phrases; correct: {}.",
            self.tokens,
            o.counts.gold(),
            o.counts.predicted(),
            o.counts.true_positives
        );
        let _ = writeln!(
            out,
            "{:>width$}  {:>9}  {:>9}  {:>9}  {:>6}  {:>6}  {:>6}",
            "type", "precision", "recall", "FB1", "tp", "fp", "fn"
        );
        let mut row = |name: &str, s: &Scores| {
            let _ = writeln!(
                out,
                "{:>width$}  {:>9.2}  {:>9.2}  {:>9.2}  {:>6}  {:>6}  {:>6}",
                name,
                100.0 * s.precision,
                100.0 * s.recall,
                100.0 * s.f1,
                s.counts.true_positives,
                s.counts.false_positives,
                s.counts.false_negatives
            );
        };
        for (ty, s) in &self.per_type {
            row(ty, s);
        }
        row("overall", o);
        out
    }
}
