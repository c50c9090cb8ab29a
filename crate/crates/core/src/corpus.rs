//! CoNLL-style corpora: one token per line, whitespace-separated columns,
//! blank lines between sentences. `-DOCSTART-` rows are document markers
//! and never become part of a sentence.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scheme::{parse_tag, Scheme};
use crate::spans::{convert_scheme, extract_spans, Span};
use crate::vocab::TagVocabulary;

pub const DOCSTART: &str = "-DOCSTART-";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<String>,
    pub labels: Vec<String>,
}

impl Sentence {
    pub fn new(tokens: Vec<String>, labels: Vec<String>) -> Result<Self> {
        if tokens.is_empty() || tokens.len() != labels.len() {
            return Err(Error::Shape(format!(
                "sentence needs matching non-empty tokens and labels, got {} and {}",
                tokens.len(),
                labels.len()
            )));
        }
        Ok(Sentence { tokens, labels })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    sentences: Vec<Sentence>,
    scheme: Scheme,
    vocab: TagVocabulary,
    docstarts: usize,
}

impl Corpus {
    /// Validates every label under `scheme` and derives the vocabulary in
    /// first-seen order.
    pub fn new(sentences: Vec<Sentence>, scheme: Scheme) -> Result<Self> {
        let mut vocab = TagVocabulary::new(Vec::<String>::new(), scheme)?;
        for s in &sentences {
            if s.is_empty() || s.tokens.len() != s.labels.len() {
                return Err(Error::Shape(
                    "sentence with mismatched or empty columns".into(),
                ));
            }
            for label in &s.labels {
                vocab.intern(label)?;
            }
        }
        Ok(Corpus {
            sentences,
            scheme,
            vocab,
            docstarts: 0,
        })
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn into_sentences(self) -> Vec<Sentence> {
        self.sentences
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn vocab(&self) -> &TagVocabulary {
        &self.vocab
    }

    /// Number of sentences.
    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn num_tokens(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    /// `-DOCSTART-` rows skipped while reading.
    pub fn docstart_lines(&self) -> usize {
        self.docstarts
    }

    /// Spans of every sentence, in sentence order.
    pub fn spans(&self) -> Result<Vec<Vec<Span>>> {
        self.sentences
            .iter()
            .map(|s| extract_spans(&s.labels, self.scheme))
            .collect()
    }

    /// Same corpus with labels re-encoded under `to`.
    pub fn convert(&self, to: Scheme) -> Result<Corpus> {
        let sentences = self
            .sentences
            .iter()
            .map(|s| {
                Ok(Sentence {
                    tokens: s.tokens.clone(),
                    labels: convert_scheme(&s.labels, self.scheme, to)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out = Corpus::new(sentences, to)?;
        out.docstarts = self.docstarts;
        Ok(out)
    }

    /// Concatenation of several corpora sharing one scheme.
    pub fn concat(parts: Vec<Corpus>) -> Result<Corpus> {
        let scheme = parts.first().map_or(Scheme::default(), Corpus::scheme);
        if parts.iter().any(|c| c.scheme != scheme) {
            return Err(Error::Config(
                "cannot concatenate corpora with different schemes".into(),
            ));
        }
        let docstarts = parts.iter().map(|c| c.docstarts).sum();
        let sentences = parts.into_iter().flat_map(|c| c.sentences).collect();
        let mut out = Corpus::new(sentences, scheme)?;
        out.docstarts = docstarts;
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReadOptions {
    pub scheme: Scheme,
    pub token_column: usize,
    /// `None` selects the last column of each row.
    pub label_column: Option<usize>,
}

impl Default for ReadOptions {
    fn default() -> Self {
        ReadOptions {
            scheme: Scheme::Iobes,
            token_column: 0,
            label_column: None,
        }
    }
}

impl ReadOptions {
    pub fn with_scheme(scheme: Scheme) -> Self {
        ReadOptions {
            scheme,
            ..Self::default()
        }
    }
}

pub fn read_conll<R: BufRead>(reader: R, options: &ReadOptions) -> Result<Corpus> {
    let min_columns = match options.label_column {
        Some(l) => options.token_column.max(l) + 1,
        None => (options.token_column + 1).max(2),
    };
    let mut sentences = Vec::new();
    let mut tokens = Vec::new();
    let mut labels = Vec::new();
    let mut docstarts = 0;
    let mut vocab = TagVocabulary::new(Vec::<String>::new(), options.scheme)?;

    let mut flush = |tokens: &mut Vec<String>, labels: &mut Vec<String>| {
        if !tokens.is_empty() {
            sentences.push(Sentence {
                tokens: std::mem::take(tokens),
                labels: std::mem::take(labels),
            });
        }
    };

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        let columns: Vec<&str> = line.split_ascii_whitespace().collect();
        if columns.is_empty() {
            flush(&mut tokens, &mut labels);
            continue;
        }
        if columns[0] == DOCSTART {
            docstarts += 1;
            flush(&mut tokens, &mut labels);
            continue;
        }
        if columns.len() < min_columns {
            return Err(Error::Conll {
                line: line_no,
                message: format!(
                    "expected at least {min_columns} columns, found {}",
                    columns.len()
                ),
            });
        }
        let label = columns[options.label_column.unwrap_or(columns.len() - 1)];
        if let Err(e) = parse_tag(label, options.scheme) {
            return Err(Error::Conll {
                line: line_no,
                message: e.to_string(),
            });
        }
        vocab.intern(label)?;
        tokens.push(columns[options.token_column].to_string());
        labels.push(label.to_string());
    }
    flush(&mut tokens, &mut labels);

    Ok(Corpus {
        sentences,
        scheme: options.scheme,
        vocab,
        docstarts,
    })
}

pub fn read_conll_path(path: impl AsRef<Path>, options: &ReadOptions) -> Result<Corpus> {
    let file = File::open(path)?;
    read_conll(BufReader::new(file), options)
}

/// Writes `token label` rows with a single blank line between sentences.
pub fn write_conll<W: Write>(corpus: &Corpus, mut out: W) -> Result<()> {
    for (k, s) in corpus.sentences.iter().enumerate() {
        if k > 0 {
            out.write_all(b"\n")?;
        }
        for (token, label) in s.tokens.iter().zip(&s.labels) {
            writeln!(out, "{token} {label}")?;
        }
    }
    out.flush()?;
    Ok(())
}
