use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scheme::{parse_tag, Scheme, Tag};

/// Dense index space over the real labels of a tag set.
///
/// Indices `0..len()` are real labels; [`go_index`](Self::go_index) and
/// [`eos_index`](Self::eos_index) are the virtual boundary tags appended
/// after them.
#[derive(Debug, Clone, PartialEq)]
pub struct TagVocabulary {
    scheme: Scheme,
    labels: Vec<String>,
    tags: Vec<Tag>,
    index: HashMap<String, usize>,
}

impl TagVocabulary {
    pub fn new<I, S>(labels: I, scheme: Scheme) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = TagVocabulary {
            scheme,
            labels: Vec::new(),
            tags: Vec::new(),
            index: HashMap::new(),
        };
        for label in labels {
            let label = label.into();
            if vocab.index.contains_key(&label) {
                return Err(Error::DuplicateLabel(label));
            }
            vocab.push(label)?;
        }
        Ok(vocab)
    }

    /// `O` followed by every label the scheme defines for each type, in
    /// the order the types are given.
    pub fn from_types<I, S>(types: I, scheme: Scheme) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let prefixes: &[&str] = match scheme {
            Scheme::Iobes => &["B", "I", "E", "S"],
            Scheme::Bio | Scheme::Iob1 => &["B", "I"],
        };
        let mut labels = vec!["O".to_string()];
        for ty in types {
            for p in prefixes {
                labels.push(format!("{p}-{}", ty.as_ref()));
            }
        }
        Self::new(labels, scheme)
    }

    /// Adds `label` if it is not present yet and returns its index.
    pub(crate) fn intern(&mut self, label: &str) -> Result<usize> {
        match self.index.get(label) {
            Some(&i) => Ok(i),
            None => self.push(label.to_string()),
        }
    }

    fn push(&mut self, label: String) -> Result<usize> {
        let tag = parse_tag(&label, self.scheme)?;
        let i = self.labels.len();
        self.index.insert(label.clone(), i);
        self.labels.push(label);
        self.tags.push(tag);
        Ok(i)
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Number of real labels.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn go_index(&self) -> usize {
        self.labels.len()
    }

    pub fn eos_index(&self) -> usize {
        self.labels.len() + 1
    }

    /// Size of the transition table including both boundary tags.
    pub fn full_size(&self) -> usize {
        self.labels.len() + 2
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels.get(index).map(String::as_str)
    }

    /// Tag at `index`, including the boundary tags.
    pub fn tag(&self, index: usize) -> Option<Tag> {
        if index < self.len() {
            Some(self.tags[index].clone())
        } else if index == self.go_index() {
            Some(Tag::go())
        } else if index == self.eos_index() {
            Some(Tag::eos())
        } else {
            None
        }
    }

    /// Distinct entity types in first-seen order.
    pub fn entity_types(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for tag in &self.tags {
            if let Some(ty) = tag.entity_type() {
                if !seen.contains(&ty) {
                    seen.push(ty);
                }
            }
        }
        seen
    }

    pub fn encode<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        labels
            .iter()
            .map(|l| {
                let l = l.as_ref();
                self.index_of(l).ok_or_else(|| Error::InvalidLabel {
                    label: l.to_string(),
                    reason: "not in vocabulary".into(),
                })
            })
            .collect()
    }

    pub fn decode(&self, indices: &[usize]) -> Result<Vec<String>> {
        indices
            .iter()
            .map(|&i| {
                self.label(i)
                    .map(str::to_string)
                    .ok_or(Error::IndexOutOfRange {
                        index: i,
                        num_tags: self.len(),
                    })
            })
            .collect()
    }
}
