//! Conversion between per-token labels and entity spans.
//!
//! Span extraction follows the conlleval chunking rules, which makes it
//! total over arbitrary (including illegal) label sequences: a tag that
//! cannot continue the current entity starts a new one, `S-` is always a
//! single-token entity, and an entity still open at the end of the
//! sentence closes there.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::{is_legal_transition, parse_tag, Prefix, Scheme, Tag};

/// An entity occupying tokens `start..end`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub entity_type: String,
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(entity_type: impl Into<String>, start: usize, end: usize) -> Self {
        Span {
            entity_type: entity_type.into(),
            start,
            end,
        }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.entity_type, self.start, self.end)
    }
}

fn chunk_ends(prev: Prefix, prev_type: &str, cur: Prefix, cur_type: &str) -> bool {
    use Prefix::*;
    matches!(prev, E | S)
        || matches!((prev, cur), (B | I, B | S | O))
        || (prev != O && prev_type != cur_type)
}

fn chunk_starts(prev: Prefix, prev_type: &str, cur: Prefix, cur_type: &str) -> bool {
    use Prefix::*;
    matches!(cur, B | S)
        || matches!((prev, cur), (E | S | O, E | I))
        || (cur != O && prev_type != cur_type)
}

/// Entity spans encoded by `labels`, in order of their start.
pub fn extract_spans<L: AsRef<str>>(labels: &[L], scheme: Scheme) -> Result<Vec<Span>> {
    let tags = labels
        .iter()
        .map(|l| parse_tag(l.as_ref(), scheme))
        .collect::<Result<Vec<_>>>()?;
    Ok(spans_from_tags(&tags))
}

pub(crate) fn spans_from_tags(tags: &[Tag]) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut open: Option<(usize, &str)> = None;
    let (mut prev, mut prev_type) = (Prefix::O, "");
    for (i, tag) in tags.iter().enumerate() {
        let (cur, cur_type) = (tag.prefix(), tag.entity_type().unwrap_or(""));
        let ends = chunk_ends(prev, prev_type, cur, cur_type);
        let starts = chunk_starts(prev, prev_type, cur, cur_type);
        if ends || starts {
            if let Some((s, ty)) = open.take() {
                spans.push(Span::new(ty, s, i));
            }
        }
        if starts {
            open = Some((i, cur_type));
        }
        prev = cur;
        prev_type = cur_type;
    }
    if let Some((s, ty)) = open {
        spans.push(Span::new(ty, s, tags.len()));
    }
    spans
}

/// The unique legal labelling of `spans` over `len` tokens.
pub fn encode_spans(spans: &[Span], len: usize, scheme: Scheme) -> Result<Vec<String>> {
    let mut sorted: Vec<&Span> = spans.iter().collect();
    sorted.sort_by_key(|s| (s.start, s.end));
    let mut labels = vec!["O".to_string(); len];
    let mut prev: Option<&Span> = None;
    for span in sorted {
        if span.is_empty() || span.end > len {
            return Err(Error::InvalidSpans(format!(
                "{span} does not fit {len} tokens"
            )));
        }
        if span.entity_type.is_empty() {
            return Err(Error::InvalidSpans(format!("{span} has an empty type")));
        }
        if let Some(p) = prev {
            if span.start < p.end {
                return Err(Error::InvalidSpans(format!("{p} overlaps {span}")));
            }
        }
        let ty = &span.entity_type;
        for (k, slot) in labels[span.start..span.end].iter_mut().enumerate() {
            let prefix = match scheme {
                Scheme::Iobes if span.len() == 1 => "S",
                Scheme::Iobes if k == 0 => "B",
                Scheme::Iobes if k + 1 == span.len() => "E",
                Scheme::Bio if k == 0 => "B",
                Scheme::Iob1
                    if k == 0
                        && prev.is_some_and(|p| p.end == span.start && &p.entity_type == ty) =>
                {
                    "B"
                }
                _ => "I",
            };
            *slot = format!("{prefix}-{ty}");
        }
        prev = Some(span);
    }
    Ok(labels)
}

/// Re-encodes `labels` from one scheme into another through their spans.
pub fn convert_scheme<L: AsRef<str>>(
    labels: &[L],
    from: Scheme,
    to: Scheme,
) -> Result<Vec<String>> {
    let spans = extract_spans(labels, from)?;
    encode_spans(&spans, labels.len(), to)
}

/// One illegal transition. `position` is the index of the token being
/// entered; the final `EOS` transition has `position == len`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub position: usize,
    pub from: String,
    pub to: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "position {}: {} -> {}",
            self.position, self.from, self.to
        )
    }
}

/// Every illegal transition in `labels`, sentence boundaries included.
pub fn validate_sequence<L: AsRef<str>>(labels: &[L], scheme: Scheme) -> Result<Vec<Violation>> {
    let tags = labels
        .iter()
        .map(|l| parse_tag(l.as_ref(), scheme))
        .collect::<Result<Vec<_>>>()?;
    Ok(violations(&tags, scheme))
}

pub(crate) fn violations(tags: &[Tag], scheme: Scheme) -> Vec<Violation> {
    if tags.is_empty() {
        return Vec::new();
    }
    let mut framed = Vec::with_capacity(tags.len() + 2);
    framed.push(Tag::go());
    framed.extend(tags.iter().cloned());
    framed.push(Tag::eos());
    framed
        .windows(2)
        .enumerate()
        .filter(|(_, w)| !is_legal_transition(scheme, &w[0], &w[1]))
        .map(|(position, w)| Violation {
            position,
            from: w[0].to_string(),
            to: w[1].to_string(),
        })
        .collect()
}
