//! Natural-language labels over internal ids.
//!
//! Labels are for communication only: nothing in the net, script, reasoning
//! or simulation layers reads them. A label is an exact, case-sensitive
//! string; several nodes may share one. Lookups by node fall back along a
//! configurable language chain that ends in English by default.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::net::NodeId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("malformed language tag {0:?}")]
    BadTag(String),
    #[error("node {0} has no label in any fallback language")]
    NoLabel(NodeId),
}

/// A syntactically checked BCP-47-style tag: alphabetic primary subtag of
/// 2-8 letters, then alphanumeric subtags of 1-8 characters, `-`-separated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LangTag(String);

impl LangTag {
    pub fn new(tag: &str) -> Result<Self, LexiconError> {
        let mut parts = tag.split('-');
        let primary = parts.next().unwrap_or("");
        let primary_ok =
            (2..=8).contains(&primary.len()) && primary.chars().all(|c| c.is_ascii_alphabetic());
        let rest_ok = parts.all(|p| (1..=8).contains(&p.len()) && p.chars().all(|c| c.is_ascii_alphanumeric()));
        if primary_ok && rest_ok {
            Ok(LangTag(tag.to_string()))
        } else {
            Err(LexiconError::BadTag(tag.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl FromStr for LangTag {
    type Err = LexiconError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LangTag::new(s)
    }
}

impl fmt::Display for LangTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    labels: BTreeMap<(NodeId, LangTag), String>,
    reverse: BTreeMap<(LangTag, String), BTreeSet<NodeId>>,
    /// Words for things that are not nodes, such as change verbs.
    terms: BTreeMap<(String, LangTag), String>,
    fallback: Vec<LangTag>,
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon {
            labels: BTreeMap::new(),
            reverse: BTreeMap::new(),
            terms: BTreeMap::new(),
            fallback: vec![LangTag("en".into())],
        }
    }
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_label(&mut self, node: NodeId, lang: LangTag, text: impl Into<String>) {
        let text = text.into();
        if let Some(old) = self.labels.insert((node, lang.clone()), text.clone()) {
            self.unindex(&lang, &old, node);
        }
        self.reverse.entry((lang, text)).or_default().insert(node);
    }

    fn unindex(&mut self, lang: &LangTag, text: &str, node: NodeId) {
        let key = (lang.clone(), text.to_string());
        if let Some(set) = self.reverse.get_mut(&key) {
            set.remove(&node);
            if set.is_empty() {
                self.reverse.remove(&key);
            }
        }
    }

    pub fn remove_label(&mut self, node: NodeId, lang: &LangTag) -> Option<String> {
        let old = self.labels.remove(&(node, lang.clone()))?;
        self.unindex(lang, &old, node);
        Some(old)
    }

    /// Drops every label of `node`.
    pub fn forget(&mut self, node: NodeId) {
        let langs: Vec<LangTag> = self
            .labels
            .keys()
            .filter(|(n, _)| *n == node)
            .map(|(_, l)| l.clone())
            .collect();
        for l in langs {
            self.remove_label(node, &l);
        }
    }

    /// The label in `lang`, or else the first hit along the fallback chain,
    /// together with the language that supplied it.
    pub fn label_of(&self, node: NodeId, lang: &LangTag) -> Result<(&str, &LangTag), LexiconError> {
        std::iter::once(lang)
            .chain(self.fallback.iter())
            .find_map(|l| {
                self.labels
                    .get_key_value(&(node, l.clone()))
                    .map(|((_, used), text)| (text.as_str(), used))
            })
            .ok_or(LexiconError::NoLabel(node))
    }

    /// Nodes labelled exactly `text` in `lang`. No fallback.
    pub fn lookup(&self, lang: &LangTag, text: &str) -> BTreeSet<NodeId> {
        self.reverse
            .get(&(lang.clone(), text.to_string()))
            .cloned()
            .unwrap_or_default()
    }

    pub fn labels(&self) -> impl Iterator<Item = (NodeId, &LangTag, &str)> + '_ {
        self.labels.iter().map(|((n, l), t)| (*n, l, t.as_str()))
    }

    pub fn label_count(&self) -> usize {
        self.labels.len()
    }

    pub fn fallback_chain(&self) -> &[LangTag] {
        &self.fallback
    }

    pub fn set_fallback_chain(&mut self, chain: Vec<LangTag>) {
        self.fallback = chain;
    }

    pub fn set_term(&mut self, key: impl Into<String>, lang: LangTag, text: impl Into<String>) {
        self.terms.insert((key.into(), lang), text.into());
    }

    /// Renders a non-node key, falling back like [`Lexicon::label_of`].
    pub fn term(&self, key: &str, lang: &LangTag) -> Option<(&str, &LangTag)> {
        std::iter::once(lang).chain(self.fallback.iter()).find_map(|l| {
            self.terms
                .get_key_value(&(key.to_string(), l.clone()))
                .map(|((_, used), text)| (text.as_str(), used))
        })
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, &LangTag, &str)> + '_ {
        self.terms.iter().map(|((k, l), t)| (k.as_str(), l, t.as_str()))
    }
}
