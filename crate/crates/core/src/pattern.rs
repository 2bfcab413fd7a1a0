//! Patterns and the three primitive pattern functions.
//!
//! A [`Pattern`] is an ordered run of symbolic [`Primitive`]s tagged with the
//! [`Modality`] it lives in. Everything the network learns or retrieves is
//! expressed through [`equal`], [`matches`] and [`difference`], all of which use
//! prefix semantics: `a` matches `b` when `a` is a (possibly equal) prefix of
//! `b`, and the difference strips the longest common prefix.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("modality mismatch: {left} vs {right}")]
    ModalityMismatch { left: Modality, right: Modality },
    #[error("invalid primitive {0:?}: tokens must be non-empty and contain no whitespace")]
    InvalidPrimitive(String),
    #[error("unknown modality {0:?}")]
    UnknownModality(String),
}

/// Named pattern space. Each modality owns its own discrimination network
/// and short-term memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Visual,
    Verbal,
    Action,
}

impl Modality {
    pub const ALL: [Modality; 3] = [Modality::Visual, Modality::Verbal, Modality::Action];

    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Visual => "visual",
            Modality::Verbal => "verbal",
            Modality::Action => "action",
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Modality {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "visual" => Ok(Modality::Visual),
            "verbal" => Ok(Modality::Verbal),
            "action" => Ok(Modality::Action),
            other => Err(PatternError::UnknownModality(other.to_string())),
        }
    }
}

/// A single opaque symbol: a word, a music frame such as `A3C4E4`, a chess
/// row, a letter or a label token.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Primitive(Arc<str>);

impl Primitive {
    pub fn new(token: &str) -> Result<Self, PatternError> {
        if token.is_empty() || token.chars().any(char::is_whitespace) {
            return Err(PatternError::InvalidPrimitive(token.to_string()));
        }
        Ok(Primitive(Arc::from(token)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Primitive {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Primitive {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Primitive::new(&s).map_err(serde::de::Error::custom)
    }
}

/// Ordered sequence of primitives within one modality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    modality: Modality,
    items: Vec<Primitive>,
}

impl Pattern {
    pub fn new(modality: Modality, items: Vec<Primitive>) -> Self {
        Pattern { modality, items }
    }

    pub fn empty(modality: Modality) -> Self {
        Pattern::new(modality, Vec::new())
    }

    /// Builds a pattern from string tokens, validating each one.
    pub fn from_tokens<I, S>(modality: Modality, tokens: I) -> Result<Self, PatternError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let items = tokens.into_iter().map(|t| Primitive::new(t.as_ref())).collect::<Result<Vec<_>, _>>()?;
        Ok(Pattern::new(modality, items))
    }

    /// Parses the canonical text form: tokens separated by single spaces.
    pub fn parse_line(modality: Modality, line: &str) -> Result<Self, PatternError> {
        if line.is_empty() {
            return Ok(Pattern::empty(modality));
        }
        Pattern::from_tokens(modality, line.split(' '))
    }

    /// Canonical text form. `parse_line(to_line(p)) == p` for every pattern.
    pub fn to_line(&self) -> String {
        join(&self.items)
    }

    pub fn modality(&self) -> Modality {
        self.modality
    }

    pub fn items(&self) -> &[Primitive] {
        &self.items
    }

    pub fn into_items(self) -> Vec<Primitive> {
        self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.modality, self.items)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.items.iter().map(Primitive::as_str).collect::<Vec<_>>().join(","))
    }
}

/// Space-separated tokens.
pub fn join(items: &[Primitive]) -> String {
    items.iter().map(Primitive::as_str).collect::<Vec<_>>().join(" ")
}

fn same_modality(a: &Pattern, b: &Pattern) -> Result<(), PatternError> {
    if a.modality != b.modality {
        return Err(PatternError::ModalityMismatch { left: a.modality, right: b.modality });
    }
    Ok(())
}

/// True iff both patterns hold exactly the same primitives in the same order.
pub fn equal(a: &Pattern, b: &Pattern) -> Result<bool, PatternError> {
    same_modality(a, b)?;
    Ok(a.items == b.items)
}

/// True iff `a` is a (possibly equal) prefix of `b`. The empty pattern
/// matches everything.
pub fn matches(a: &Pattern, b: &Pattern) -> Result<bool, PatternError> {
    same_modality(a, b)?;
    Ok(is_prefix(&a.items, &b.items))
}

/// `a` with its longest common prefix with `b` removed.
pub fn difference(a: &Pattern, b: &Pattern) -> Result<Pattern, PatternError> {
    same_modality(a, b)?;
    Ok(Pattern::new(a.modality, strip_common_prefix(&a.items, &b.items).to_vec()))
}

pub(crate) fn is_prefix(a: &[Primitive], b: &[Primitive]) -> bool {
    a.len() <= b.len() && a.iter().zip(b).all(|(x, y)| x == y)
}

pub(crate) fn common_prefix_len(a: &[Primitive], b: &[Primitive]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

pub(crate) fn strip_common_prefix<'a>(a: &'a [Primitive], b: &[Primitive]) -> &'a [Primitive] {
    &a[common_prefix_len(a, b)..]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Pattern {
        Pattern::from_tokens(Modality::Visual, s.chars().map(|c| c.to_string())).unwrap()
    }

    #[test]
    fn equal_examples() {
        assert!(equal(&p("AB"), &p("AB")).unwrap());
        assert!(equal(&p(""), &p("")).unwrap());
        assert!(!equal(&p("AB"), &p("AC")).unwrap());
    }

    #[test]
    fn matches_examples() {
        assert!(matches(&p("ABC"), &p("ABCD")).unwrap());
        assert!(!matches(&p("ABC"), &p("ACB")).unwrap());
        assert!(matches(&p(""), &p("A")).unwrap());
        assert!(!matches(&p("ABCD"), &p("ABC")).unwrap());
    }

    #[test]
    fn difference_examples() {
        assert_eq!(difference(&p("ABFC"), &p("ABC")).unwrap(), p("FC"));
        assert_eq!(difference(&p("AB"), &p("BC")).unwrap(), p("AB"));
        assert_eq!(difference(&p("AB"), &p("AB")).unwrap(), p(""));
    }

    #[test]
    fn modality_mismatch_is_usage_error() {
        let verbal = Pattern::from_tokens(Modality::Verbal, ["A"]).unwrap();
        let err = equal(&p("A"), &verbal).unwrap_err();
        assert!(matches!(err, PatternError::ModalityMismatch { .. }));
        assert!(matches(&p("A"), &verbal).is_err());
        assert!(difference(&p("A"), &verbal).is_err());
    }

    #[test]
    fn primitive_validation() {
        assert!(Primitive::new("").is_err());
        assert!(Primitive::new("a b").is_err());
        assert!(Primitive::new("a\tb").is_err());
        assert!(Primitive::new("A3C4E4").is_ok());
    }

    #[test]
    fn order_is_significant() {
        let a = Pattern::from_tokens(Modality::Verbal, ["dog", "bites", "man"]).unwrap();
        let b = Pattern::from_tokens(Modality::Verbal, ["man", "bites", "dog"]).unwrap();
        assert!(!equal(&a, &b).unwrap());
    }

    #[test]
    fn text_form() {
        let a = Pattern::parse_line(Modality::Verbal, "the quick fox").unwrap();
        assert_eq!(a.len(), 3);
        assert_eq!(a.to_line(), "the quick fox");
        assert!(Pattern::parse_line(Modality::Verbal, "").unwrap().is_empty());
        // double spaces would produce an empty token
        assert!(Pattern::parse_line(Modality::Verbal, "a  b").is_err());
    }
}
