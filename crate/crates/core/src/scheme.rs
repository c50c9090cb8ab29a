//! Span encoding schemes and the legality rules between adjacent tags.
//!
//! A label such as `B-ORG` decomposes into a position [`Prefix`] and an
//! entity type. The virtual `GO` and `EOS` tags frame every sentence so
//! the same rules also govern which tags may open and close a sequence.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Prefix {
    O,
    B,
    I,
    E,
    S,
    Go,
    Eos,
}

impl Prefix {
    pub fn as_str(self) -> &'static str {
        match self {
            Prefix::O => "O",
            Prefix::B => "B",
            Prefix::I => "I",
            Prefix::E => "E",
            Prefix::S => "S",
            Prefix::Go => "<GO>",
            Prefix::Eos => "<EOS>",
        }
    }

    /// True for prefixes that carry an entity type.
    pub fn is_entity(self) -> bool {
        matches!(self, Prefix::B | Prefix::I | Prefix::E | Prefix::S)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Scheme {
    /// Original CoNLL-2003 encoding: `I-` opens entities, `B-` only splits
    /// adjacent entities of the same type.
    Iob1,
    /// Also known as IOB2: every entity opens with `B-`.
    Bio,
    #[default]
    Iobes,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Iob1, Scheme::Bio, Scheme::Iobes];

    /// Whether `prefix` may appear in a label under this scheme.
    pub fn allows_prefix(self, prefix: Prefix) -> bool {
        match prefix {
            Prefix::O | Prefix::B | Prefix::I => true,
            Prefix::E | Prefix::S => self == Scheme::Iobes,
            Prefix::Go | Prefix::Eos => false,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Iob1 => "iob1",
            Scheme::Bio => "bio",
            Scheme::Iobes => "iobes",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iob1" | "iob" => Ok(Scheme::Iob1),
            "bio" | "iob2" => Ok(Scheme::Bio),
            "iobes" | "bioes" => Ok(Scheme::Iobes),
            other => Err(Error::Config(format!("unknown scheme {other:?}"))),
        }
    }
}

/// A decomposed label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tag {
    prefix: Prefix,
    entity_type: Option<String>,
}

impl Tag {
    pub fn outside() -> Self {
        Tag {
            prefix: Prefix::O,
            entity_type: None,
        }
    }

    pub fn go() -> Self {
        Tag {
            prefix: Prefix::Go,
            entity_type: None,
        }
    }

    pub fn eos() -> Self {
        Tag {
            prefix: Prefix::Eos,
            entity_type: None,
        }
    }

    /// Builds an entity tag. Fails if `prefix` does not carry a type or
    /// `entity_type` is empty.
    pub fn entity(prefix: Prefix, entity_type: impl Into<String>) -> Result<Self> {
        let entity_type = entity_type.into();
        if !prefix.is_entity() {
            return Err(Error::InvalidLabel {
                label: format!("{}-{}", prefix.as_str(), entity_type),
                reason: "prefix does not take an entity type".into(),
            });
        }
        if entity_type.is_empty() {
            return Err(Error::InvalidLabel {
                label: format!("{}-", prefix.as_str()),
                reason: "empty entity type".into(),
            });
        }
        Ok(Tag {
            prefix,
            entity_type: Some(entity_type),
        })
    }

    pub fn prefix(&self) -> Prefix {
        self.prefix
    }

    pub fn entity_type(&self) -> Option<&str> {
        self.entity_type.as_deref()
    }

    fn same_type(&self, other: &Tag) -> bool {
        self.entity_type.is_some() && self.entity_type == other.entity_type
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.entity_type {
            Some(ty) => write!(f, "{}-{}", self.prefix.as_str(), ty),
            None => f.write_str(self.prefix.as_str()),
        }
    }
}

/// Parses a surface label such as `B-WORK_OF_ART` or `O`.
///
/// The label is split on its first hyphen only, so types that themselves
/// contain hyphens (`I-creative-work`) survive intact.
pub fn parse_tag(label: &str, scheme: Scheme) -> Result<Tag> {
    let invalid = |reason: &str| Error::InvalidLabel {
        label: label.to_string(),
        reason: reason.to_string(),
    };
    if label.is_empty() {
        return Err(invalid("empty label"));
    }
    if label == "O" {
        return Ok(Tag::outside());
    }
    let (head, entity_type) = label
        .split_once('-')
        .ok_or_else(|| invalid("expected PREFIX-TYPE or O"))?;
    let prefix = match head {
        "B" => Prefix::B,
        "I" => Prefix::I,
        "E" => Prefix::E,
        "S" => Prefix::S,
        _ => return Err(invalid("unknown prefix")),
    };
    if !scheme.allows_prefix(prefix) {
        return Err(invalid(&format!(
            "prefix {head} is not part of the {scheme} scheme"
        )));
    }
    if entity_type.is_empty() {
        return Err(invalid("empty entity type"));
    }
    Ok(Tag {
        prefix,
        entity_type: Some(entity_type.to_string()),
    })
}

/// Decides whether `to` may directly follow `from` under `scheme`.
///
/// `GO` is only meaningful as `from` and `EOS` only as `to`. Tags whose
/// prefix lies outside the scheme's alphabet are never legal.
pub fn is_legal_transition(scheme: Scheme, from: &Tag, to: &Tag) -> bool {
    use Prefix::*;

    if to.prefix == Go || from.prefix == Eos {
        return false;
    }
    if from.prefix == Go && to.prefix == Eos {
        // sentences have at least one token
        return false;
    }
    let known = |t: &Tag| matches!(t.prefix, Go | Eos) || scheme.allows_prefix(t.prefix);
    if !known(from) || !known(to) {
        return false;
    }

    match scheme {
        Scheme::Iobes => match from.prefix {
            B | I => matches!(to.prefix, I | E) && from.same_type(to),
            Go | O | E | S => matches!(to.prefix, O | B | S | Eos),
            Eos => false,
        },
        Scheme::Bio => match to.prefix {
            I => matches!(from.prefix, B | I) && from.same_type(to),
            O | B | Eos => true,
            _ => false,
        },
        Scheme::Iob1 => match to.prefix {
            B => matches!(from.prefix, B | I) && from.same_type(to),
            O | I | Eos => true,
            _ => false,
        },
    }
}
