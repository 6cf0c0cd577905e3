//! Diagram visibility: which nodes are shown, expanded, removed, highlighted.
//!
//! A node is visible iff every strict ancestor is expanded, neither it nor any
//! ancestor is removed, and its kind is enabled. [`ViewState`] caches the
//! visible set and updates it incrementally on every transition;
//! [`visible_from_scratch`] recomputes it from that definition.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{EntityGraph, EntityKind, RelationId};
use crate::token::Token;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ViewError {
    #[error("node {0} is not visible")]
    Hidden(Token),
    #[error("no entity with token {0}")]
    Unknown(Token),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViewState {
    pub expanded: BTreeSet<Token>,
    pub removed: BTreeSet<Token>,
    pub highlighted: BTreeSet<Token>,
    pub enabled_kinds: BTreeSet<EntityKind>,
    pub enabled_relations: BTreeSet<RelationId>,
    visible: BTreeSet<Token>,
}

pub fn default_kinds() -> BTreeSet<EntityKind> {
    EntityKind::ALL
        .into_iter()
        .filter(|k| *k != EntityKind::Package)
        .collect()
}

/// Solutions expanded, so solutions and their projects show. Packages stay
/// hidden until their kind is enabled.
pub fn default_view(g: &EntityGraph) -> ViewState {
    ViewState::from_parts(
        g,
        g.roots().map(|e| e.token.clone()).collect(),
        BTreeSet::new(),
        default_kinds(),
        BTreeSet::from([RelationId::Declares]),
    )
}

/// Every node expanded and every kind enabled.
pub fn full_view(g: &EntityGraph, relations: impl IntoIterator<Item = RelationId>) -> ViewState {
    let mut enabled_relations: BTreeSet<RelationId> = relations.into_iter().collect();
    enabled_relations.insert(RelationId::Declares);
    ViewState::from_parts(
        g,
        g.entities.keys().cloned().collect(),
        BTreeSet::new(),
        EntityKind::ALL.into_iter().collect(),
        enabled_relations,
    )
}

/// Closed-form visible set.
pub fn visible_from_scratch(
    g: &EntityGraph,
    expanded: &BTreeSet<Token>,
    removed: &BTreeSet<Token>,
    enabled_kinds: &BTreeSet<EntityKind>,
) -> BTreeSet<Token> {
    g.entities
        .values()
        .filter(|e| {
            enabled_kinds.contains(&e.kind)
                && !removed.contains(&e.token)
                && e.token
                    .ancestors()
                    .all(|a| expanded.contains(&a) && !removed.contains(&a))
        })
        .map(|e| e.token.clone())
        .collect()
}

fn descendants<'a>(set: &'a BTreeSet<Token>, t: &'a Token) -> impl Iterator<Item = &'a Token> + 'a {
    set.range(t.clone()..).skip_while(move |x| *x == t).take_while(move |x| t.is_ancestor_of(x))
}

impl ViewState {
    pub fn from_parts(
        g: &EntityGraph,
        expanded: BTreeSet<Token>,
        removed: BTreeSet<Token>,
        enabled_kinds: BTreeSet<EntityKind>,
        mut enabled_relations: BTreeSet<RelationId>,
    ) -> Self {
        enabled_relations.insert(RelationId::Declares);
        let visible = visible_from_scratch(g, &expanded, &removed, &enabled_kinds);
        ViewState {
            expanded,
            removed,
            highlighted: BTreeSet::new(),
            enabled_kinds,
            enabled_relations,
            visible,
        }
    }

    pub fn visible(&self) -> &BTreeSet<Token> {
        &self.visible
    }

    pub fn is_visible(&self, t: &Token) -> bool {
        self.visible.contains(t)
    }

    pub fn is_removed(&self, t: &Token) -> bool {
        self.removed.contains(t) || t.ancestors().any(|a| self.removed.contains(&a))
    }

    pub fn toggle_expand(&self, g: &EntityGraph, t: &Token) -> Result<ViewState, ViewError> {
        if !g.entities.contains_key(t) {
            return Err(ViewError::Unknown(t.clone()));
        }
        if !self.visible.contains(t) {
            return Err(ViewError::Hidden(t.clone()));
        }
        let mut next = self.clone();
        if next.expanded.remove(t) {
            let cone: Vec<Token> = descendants(&next.visible, t).cloned().collect();
            for d in cone {
                next.visible.remove(&d);
                next.highlighted.remove(&d);
            }
        } else {
            next.expanded.insert(t.clone());
            next.reveal_below(g, t);
        }
        Ok(next)
    }

    /// Adds every descendant of the expanded, unremoved node `t` that the
    /// visibility rule admits.
    fn reveal_below(&mut self, g: &EntityGraph, t: &Token) {
        let mut stack: Vec<Token> = g.targets(RelationId::Declares, t).cloned().collect();
        while let Some(c) = stack.pop() {
            if self.removed.contains(&c) {
                continue;
            }
            let Some(entity) = g.entities.get(&c) else { continue };
            if self.enabled_kinds.contains(&entity.kind) {
                self.visible.insert(c.clone());
            }
            if self.expanded.contains(&c) {
                stack.extend(g.targets(RelationId::Declares, &c).cloned());
            }
        }
    }

    /// Removes `t` and, implicitly, everything below it until the next refresh.
    pub fn remove(&self, g: &EntityGraph, t: &Token) -> Result<ViewState, ViewError> {
        if !g.entities.contains_key(t) {
            return Err(ViewError::Unknown(t.clone()));
        }
        if !self.visible.contains(t) {
            return Err(ViewError::Hidden(t.clone()));
        }
        let mut next = self.clone();
        next.removed.insert(t.clone());
        let cone: Vec<Token> = descendants(&next.visible, t).cloned().collect();
        next.visible.remove(t);
        for d in &cone {
            next.visible.remove(d);
        }
        next.highlighted.remove(t);
        for d in &cone {
            next.highlighted.remove(d);
        }
        Ok(next)
    }

    /// Clears removals and highlights; keeps expansions whose tokens still exist.
    pub fn refresh(&self, g: &EntityGraph) -> ViewState {
        let expanded = self
            .expanded
            .iter()
            .filter(|t| g.entities.contains_key(t))
            .cloned()
            .collect();
        ViewState::from_parts(
            g,
            expanded,
            BTreeSet::new(),
            self.enabled_kinds.clone(),
            self.enabled_relations.clone(),
        )
    }

    pub fn set_kind_enabled(&self, g: &EntityGraph, kind: EntityKind, enabled: bool) -> ViewState {
        let mut next = self.clone();
        if enabled {
            next.enabled_kinds.insert(kind);
        } else {
            next.enabled_kinds.remove(&kind);
        }
        next.visible = visible_from_scratch(g, &next.expanded, &next.removed, &next.enabled_kinds);
        next.highlighted.retain(|t| next.visible.contains(t));
        next
    }

    pub fn set_relation_enabled(&self, relation: RelationId, enabled: bool) -> ViewState {
        let mut next = self.clone();
        if enabled || relation == RelationId::Declares {
            next.enabled_relations.insert(relation);
        } else {
            next.enabled_relations.remove(&relation);
        }
        next
    }

    /// Replaces the highlighted set; callers guarantee it is a subset of the visible set.
    pub fn with_highlighted(&self, highlighted: BTreeSet<Token>) -> ViewState {
        let mut next = self.clone();
        next.highlighted = highlighted;
        next
    }

    /// Restricts the visible set to `keep` by removing every other visible node.
    /// `keep` must be closed under visible ancestors.
    pub fn isolate(&self, keep: &BTreeSet<Token>) -> ViewState {
        let mut next = self.clone();
        let dropped: Vec<Token> = next.visible.difference(keep).cloned().collect();
        for t in dropped {
            next.visible.remove(&t);
            next.removed.insert(t);
        }
        next.highlighted.retain(|t| next.visible.contains(t));
        next
    }
}
