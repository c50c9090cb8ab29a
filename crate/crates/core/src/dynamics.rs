//! Corpus diagnostics describing how much work transition constraints can
//! do on a dataset:
//!
//! * **ambiguity**: share of token occurrences whose surface form is seen
//!   with more than one label anywhere in the corpus;
//! * **strictly dominated**: share of those ambiguous occurrences for which
//!   exactly one of the form's observed labels may legally follow the
//!   previous gold label;
//! * **easy first / easy last**: share of entity occurrences whose first
//!   (last) token form only ever carries a single label.
//!
//! All label sets are over full labels (prefix and type) in the scheme the
//! metrics are requested for; corpora in another scheme are converted first.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::scheme::{is_legal_transition, Scheme, Tag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AmbiguityMode {
    /// Count token occurrences.
    #[default]
    Occurrences,
    /// Count distinct surface forms.
    Forms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DynamicsOptions {
    pub case_fold: bool,
    pub ambiguity: AmbiguityMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Ratio {
    pub count: usize,
    pub total: usize,
}

impl Ratio {
    /// Percentage in `[0, 100]`; 0 when the total is 0.
    pub fn percent(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.count as f64 / self.total as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TagDynamicsReport {
    pub scheme: Scheme,
    pub case_fold: bool,
    pub ambiguity_mode: AmbiguityMode,
    pub sentences: usize,
    pub tokens: usize,
    pub tag_types: usize,
    pub ambiguity: Ratio,
    pub strictly_dominated: Ratio,
    pub easy_first: Ratio,
    pub easy_last: Ratio,
    pub ambiguity_pct: f64,
    pub strictly_dominated_pct: f64,
    pub easy_first_pct: f64,
    pub easy_last_pct: f64,
    pub warnings: Vec<String>,
}

fn form<'a>(token: &'a str, options: &DynamicsOptions) -> Cow<'a, str> {
    if options.case_fold {
        Cow::Owned(token.to_lowercase())
    } else {
        Cow::Borrowed(token)
    }
}

fn in_scheme(corpus: &Corpus, scheme: Scheme) -> Result<Cow<'_, Corpus>> {
    if corpus.scheme() == scheme {
        Ok(Cow::Borrowed(corpus))
    } else {
        Ok(Cow::Owned(corpus.convert(scheme)?))
    }
}

/// Surface form → every label it carries in the corpus.
pub fn token_label_sets(
    corpus: &Corpus,
    options: &DynamicsOptions,
) -> BTreeMap<String, BTreeSet<String>> {
    let mut sets: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for s in corpus.sentences() {
        for (tok, label) in s.tokens.iter().zip(&s.labels) {
            sets.entry(form(tok, options).into_owned())
                .or_default()
                .insert(label.clone());
        }
    }
    sets
}

/// Label-index sets keyed by form; the working representation of
/// [`token_label_sets`].
struct LabelIndex<'c> {
    corpus: &'c Corpus,
    sets: HashMap<Cow<'c, str>, BTreeSet<usize>>,
    options: DynamicsOptions,
}

impl<'c> LabelIndex<'c> {
    fn build(corpus: &'c Corpus, options: &DynamicsOptions) -> Self {
        let vocab = corpus.vocab();
        let mut sets: HashMap<Cow<'c, str>, BTreeSet<usize>> = HashMap::new();
        for s in corpus.sentences() {
            for (tok, label) in s.tokens.iter().zip(&s.labels) {
                let idx = vocab
                    .index_of(label)
                    .expect("corpus labels are in its vocabulary");
                sets.entry(form(tok, options)).or_default().insert(idx);
            }
        }
        LabelIndex {
            corpus,
            sets,
            options: *options,
        }
    }

    fn set(&self, token: &str) -> &BTreeSet<usize> {
        &self.sets[form(token, &self.options).as_ref()]
    }

    fn is_ambiguous(&self, token: &str) -> bool {
        self.set(token).len() > 1
    }

    fn ambiguity(&self) -> Ratio {
        match self.options.ambiguity {
            AmbiguityMode::Occurrences => {
                let mut r = Ratio::default();
                for s in self.corpus.sentences() {
                    for tok in &s.tokens {
                        r.total += 1;
                        r.count += usize::from(self.is_ambiguous(tok));
                    }
                }
                r
            }
            AmbiguityMode::Forms => Ratio {
                count: self.sets.values().filter(|s| s.len() > 1).count(),
                total: self.sets.len(),
            },
        }
    }

    fn strictly_dominated(&self) -> Ratio {
        let vocab = self.corpus.vocab();
        let scheme = self.corpus.scheme();
        let t = vocab.len();
        // legal[prev][label], prev == t stands for GO
        let mut froms: Vec<Tag> = (0..t).map(|i| vocab.tag(i).expect("real tag")).collect();
        froms.push(Tag::go());
        let legal: Vec<Vec<bool>> = froms
            .iter()
            .map(|f| {
                (0..t)
                    .map(|i| is_legal_transition(scheme, f, &vocab.tag(i).expect("real tag")))
                    .collect()
            })
            .collect();

        let mut r = Ratio::default();
        for s in self.corpus.sentences() {
            let mut prev = t;
            for (tok, label) in s.tokens.iter().zip(&s.labels) {
                let set = self.set(tok);
                if set.len() > 1 {
                    r.total += 1;
                    let options = set.iter().filter(|&&l| legal[prev][l]).count();
                    r.count += usize::from(options == 1);
                }
                prev = vocab
                    .index_of(label)
                    .expect("corpus labels are in its vocabulary");
            }
        }
        r
    }

    fn easy_boundaries(&self) -> Result<(Ratio, Ratio)> {
        let mut first = Ratio::default();
        let mut last = Ratio::default();
        for (s, spans) in self.corpus.sentences().iter().zip(self.corpus.spans()?) {
            for span in spans {
                first.total += 1;
                last.total += 1;
                first.count += usize::from(!self.is_ambiguous(&s.tokens[span.start]));
                last.count += usize::from(!self.is_ambiguous(&s.tokens[span.end - 1]));
            }
        }
        if first.total == 0 {
            return Err(Error::NoEntities);
        }
        Ok((first, last))
    }
}

fn non_empty(corpus: &Corpus) -> Result<()> {
    if corpus.num_tokens() == 0 {
        Err(Error::EmptyCorpus)
    } else {
        Ok(())
    }
}

/// Share of ambiguous tokens (see [`AmbiguityMode`]).
pub fn ambiguity(corpus: &Corpus, options: &DynamicsOptions) -> Result<Ratio> {
    non_empty(corpus)?;
    Ok(LabelIndex::build(corpus, options).ambiguity())
}

/// Share of ambiguous occurrences forced to a single label by the previous
/// gold label. A corpus without ambiguous tokens yields `0/0`.
pub fn strictly_dominated(
    corpus: &Corpus,
    scheme: Scheme,
    options: &DynamicsOptions,
) -> Result<Ratio> {
    non_empty(corpus)?;
    let corpus = in_scheme(corpus, scheme)?;
    let r = LabelIndex::build(&corpus, options).strictly_dominated();
    if r.total == 0 {
        log::warn!("corpus has no ambiguous tokens; strict domination reported as 0");
    }
    Ok(r)
}

/// `(easy first, easy last)` over entity occurrences.
pub fn easy_boundaries(
    corpus: &Corpus,
    scheme: Scheme,
    options: &DynamicsOptions,
) -> Result<(Ratio, Ratio)> {
    non_empty(corpus)?;
    let corpus = in_scheme(corpus, scheme)?;
    LabelIndex::build(&corpus, options).easy_boundaries()
}

/// All four diagnostics plus the entity type count, computed on the labels
/// of `scheme`.
pub fn analyze(
    corpus: &Corpus,
    scheme: Scheme,
    options: &DynamicsOptions,
) -> Result<TagDynamicsReport> {
    non_empty(corpus)?;
    let corpus = in_scheme(corpus, scheme)?;
    let index = LabelIndex::build(&corpus, options);
    let ambiguity = index.ambiguity();
    let strictly_dominated = index.strictly_dominated();
    let (easy_first, easy_last) = index.easy_boundaries()?;

    let mut warnings = Vec::new();
    if strictly_dominated.total == 0 {
        let msg = "corpus has no ambiguous tokens; strict domination reported as 0".to_string();
        log::warn!("{msg}");
        warnings.push(msg);
    }
    Ok(TagDynamicsReport {
        scheme,
        case_fold: options.case_fold,
        ambiguity_mode: options.ambiguity,
        sentences: corpus.len(),
        tokens: corpus.num_tokens(),
        tag_types: corpus.vocab().entity_types().len(),
        ambiguity_pct: ambiguity.percent(),
        strictly_dominated_pct: strictly_dominated.percent(),
        easy_first_pct: easy_first.percent(),
        easy_last_pct: easy_last.percent(),
        ambiguity,
        strictly_dominated,
        easy_first,
        easy_last,
        warnings,
    })
}

impl TagDynamicsReport {
    pub fn table_header() -> String {
        format!(
            "{:<24} {:>9} {:>9} {:>18} {:>10} {:>9}",
            "Dataset", "Tag Types", "Ambiguity", "Strictly Dominated", "Easy First", "Easy Last"
        )
    }

    /// One row with percentages to one decimal.
    pub fn table_row(&self, name: &str) -> String {
        format!(
            "{:<24} {:>9} {:>8.1}% {:>17.1}% {:>9.1}% {:>8.1}%",
            name,
            self.tag_types,
            self.ambiguity_pct,
            self.strictly_dominated_pct,
            self.easy_first_pct,
            self.easy_last_pct
        )
    }
}
