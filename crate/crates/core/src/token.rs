//! Hierarchical numeric tokens.
//!
//! A token is the path of sibling ordinals from a `declares` root down to an
//! entity. Tokens compare lexicographically over their integer sequence, so
//! sorting tokens yields a depth-first pre-order walk of the forest and every
//! subtree occupies a contiguous range.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::model::EntityKind;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Token(Vec<u32>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed token {input:?} at offset {offset}: {reason}")]
pub struct TokenParseError {
    pub input: String,
    pub offset: usize,
    pub reason: &'static str,
}

impl Token {
    /// Returns `None` for an empty path.
    pub fn new(path: Vec<u32>) -> Option<Self> {
        if path.is_empty() {
            None
        } else {
            Some(Token(path))
        }
    }

    pub fn root(ordinal: u32) -> Self {
        Token(vec![ordinal])
    }

    pub fn child(&self, ordinal: u32) -> Self {
        let mut path = Vec::with_capacity(self.0.len() + 1);
        path.extend_from_slice(&self.0);
        path.push(ordinal);
        Token(path)
    }

    pub fn path(&self) -> &[u32] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.len() == 1
    }

    pub fn parent(&self) -> Option<Token> {
        if self.0.len() > 1 {
            Some(Token(self.0[..self.0.len() - 1].to_vec()))
        } else {
            None
        }
    }

    pub fn last(&self) -> u32 {
        *self.0.last().expect("tokens are non-empty")
    }

    /// True iff `self` is a strict prefix of `other`.
    pub fn is_ancestor_of(&self, other: &Token) -> bool {
        self.0.len() < other.0.len() && other.0.starts_with(&self.0)
    }

    /// Strict ancestors from the root down, excluding `self`.
    pub fn ancestors(&self) -> impl Iterator<Item = Token> + '_ {
        (1..self.0.len()).map(move |len| Token(self.0[..len].to_vec()))
    }
}

pub fn is_ancestor(a: &Token, b: &Token) -> bool {
    a.is_ancestor_of(b)
}

impl Ord for Token {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl PartialOrd for Token {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for part in &self.0 {
            if !first {
                f.write_str(".")?;
            }
            first = false;
            write!(f, "{part}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Token({self})")
    }
}

pub fn render_token(t: &Token) -> String {
    t.to_string()
}

/// Parses `uint ("." uint)*`; leading zeros are rejected except for `0` itself.
pub fn parse_token(s: &str) -> Result<Token, TokenParseError> {
    let err = |offset: usize, reason: &'static str| TokenParseError {
        input: s.to_string(),
        offset,
        reason,
    };
    if s.is_empty() {
        return Err(err(0, "empty token"));
    }
    let mut path = Vec::new();
    let mut offset = 0;
    for part in s.split('.') {
        if part.is_empty() {
            return Err(err(offset, "empty component"));
        }
        if let Some(pos) = part.find(|c: char| !c.is_ascii_digit()) {
            return Err(err(offset + pos, "expected a decimal digit"));
        }
        if part.len() > 1 && part.starts_with('0') {
            return Err(err(offset, "leading zero"));
        }
        let value = part
            .parse::<u32>()
            .map_err(|_| err(offset, "component out of range"))?;
        path.push(value);
        offset += part.len() + 1;
    }
    Ok(Token(path))
}

impl FromStr for Token {
    type Err = TokenParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_token(s)
    }
}

impl Serialize for Token {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Token {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_token(&text).map_err(serde::de::Error::custom)
    }
}

/// Sibling ordering key: kind rank first, then case-sensitive name, then a
/// disambiguator (parameter signature for overloads, arity for generics).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiblingKey {
    pub rank: u8,
    pub name: String,
    pub disambiguator: String,
}

impl SiblingKey {
    pub fn new(kind: EntityKind, name: impl Into<String>, disambiguator: impl Into<String>) -> Self {
        SiblingKey {
            rank: kind.rank(),
            name: name.into(),
            disambiguator: disambiguator.into(),
        }
    }
}

/// A node of the `declares` forest before tokens exist. Nodes are addressed by
/// their index into the slice handed to [`assign_tokens`].
#[derive(Debug, Clone)]
pub struct ForestNode {
    pub parent: Option<usize>,
    pub key: SiblingKey,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssignError {
    #[error("siblings under {parent} share the key {key:?}")]
    Ambiguous { parent: String, key: SiblingKey },
    #[error("node {node} names missing parent {parent}")]
    MissingParent { node: usize, parent: usize },
    #[error("node {0} is part of a parent cycle")]
    Cycle(usize),
}

/// Assigns a token to every forest node. The result only depends on the
/// sibling keys and parent links, never on the order of `nodes`.
///
/// Roots are ordered by the same key as siblings.
pub fn assign_tokens(nodes: &[ForestNode]) -> Result<Vec<Token>, AssignError> {
    let mut children: BTreeMap<Option<usize>, Vec<usize>> = BTreeMap::new();
    for (index, node) in nodes.iter().enumerate() {
        if let Some(parent) = node.parent {
            if parent >= nodes.len() {
                return Err(AssignError::MissingParent { node: index, parent });
            }
        }
        children.entry(node.parent).or_default().push(index);
    }
    for (parent, list) in children.iter_mut() {
        list.sort_by(|&a, &b| nodes[a].key.cmp(&nodes[b].key));
        for pair in list.windows(2) {
            if nodes[pair[0]].key == nodes[pair[1]].key {
                let parent = match parent {
                    Some(p) => format!("node {p} ({:?})", nodes[*p].key.name),
                    None => "the forest root level".to_string(),
                };
                return Err(AssignError::Ambiguous {
                    parent,
                    key: nodes[pair[0]].key.clone(),
                });
            }
        }
    }

    let mut tokens: Vec<Option<Token>> = vec![None; nodes.len()];
    let mut stack: Vec<(usize, Token)> = Vec::new();
    if let Some(roots) = children.get(&None) {
        for (ordinal, &root) in roots.iter().enumerate().rev() {
            stack.push((root, Token::root(ordinal as u32)));
        }
    }
    while let Some((node, token)) = stack.pop() {
        if let Some(kids) = children.get(&Some(node)) {
            for (ordinal, &kid) in kids.iter().enumerate().rev() {
                stack.push((kid, token.child(ordinal as u32)));
            }
        }
        tokens[node] = Some(token);
    }

    tokens
        .into_iter()
        .enumerate()
        .map(|(index, token)| token.ok_or(AssignError::Cycle(index)))
        .collect()
}
