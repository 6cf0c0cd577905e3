//! The language-neutral entity graph.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::token::Token;

pub const SCHEMA_VERSION: &str = "codecarta-graph/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EntityKind {
    Solution,
    Project,
    Package,
    Namespace,
    Type,
    Field,
    Method,
    Property,
    Event,
}

impl EntityKind {
    pub const ALL: [EntityKind; 9] = [
        EntityKind::Solution,
        EntityKind::Project,
        EntityKind::Package,
        EntityKind::Namespace,
        EntityKind::Type,
        EntityKind::Field,
        EntityKind::Method,
        EntityKind::Property,
        EntityKind::Event,
    ];

    /// Position in the containment hierarchy. A `declares` child always ranks
    /// strictly higher than its parent.
    pub fn rank(self) -> u8 {
        match self {
            EntityKind::Solution => 0,
            EntityKind::Project => 1,
            EntityKind::Package | EntityKind::Namespace => 2,
            EntityKind::Type => 3,
            EntityKind::Field | EntityKind::Method | EntityKind::Property | EntityKind::Event => 4,
        }
    }

    pub fn is_member(self) -> bool {
        self.rank() == 4
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Solution => "solution",
            EntityKind::Project => "project",
            EntityKind::Package => "package",
            EntityKind::Namespace => "namespace",
            EntityKind::Type => "type",
            EntityKind::Field => "field",
            EntityKind::Method => "method",
            EntityKind::Property => "property",
            EntityKind::Event => "event",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        EntityKind::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum TypeKind {
    Class,
    Struct,
    Enum,
    Interface,
    Delegate,
}

impl TypeKind {
    pub const ALL: [TypeKind; 5] = [
        TypeKind::Class,
        TypeKind::Struct,
        TypeKind::Enum,
        TypeKind::Interface,
        TypeKind::Delegate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TypeKind::Class => "class",
            TypeKind::Struct => "struct",
            TypeKind::Enum => "enum",
            TypeKind::Interface => "interface",
            TypeKind::Delegate => "delegate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MethodKind {
    Ordinary,
    Constructor,
    Getter,
    Setter,
    Operator,
    Other(String),
}

impl MethodKind {
    /// Wire and query form. `Other` labels carry an `other:` prefix so they can
    /// never be confused with the named variants.
    pub fn label(&self) -> String {
        match self {
            MethodKind::Ordinary => "ordinary".into(),
            MethodKind::Constructor => "constructor".into(),
            MethodKind::Getter => "getter".into(),
            MethodKind::Setter => "setter".into(),
            MethodKind::Operator => "operator".into(),
            MethodKind::Other(label) => format!("other:{label}"),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "ordinary" => MethodKind::Ordinary,
            "constructor" => MethodKind::Constructor,
            "getter" => MethodKind::Getter,
            "setter" => MethodKind::Setter,
            "operator" => MethodKind::Operator,
            other => MethodKind::Other(other.strip_prefix("other:")?.to_string()),
        })
    }
}

impl Serialize for MethodKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for MethodKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        MethodKind::parse(&text)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown method kind {text:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Accessibility {
    Public,
    Internal,
    Protected,
    ProtectedInternal,
    PrivateProtected,
    Private,
}

impl Accessibility {
    pub const ALL: [Accessibility; 6] = [
        Accessibility::Public,
        Accessibility::Internal,
        Accessibility::Protected,
        Accessibility::ProtectedInternal,
        Accessibility::PrivateProtected,
        Accessibility::Private,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Accessibility::Public => "public",
            Accessibility::Internal => "internal",
            Accessibility::Protected => "protected",
            Accessibility::ProtectedInternal => "protectedInternal",
            Accessibility::PrivateProtected => "privateProtected",
            Accessibility::Private => "private",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Severity {
    Hint,
    Warning,
    Error,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Hint => "hint",
            Severity::Warning => "warning",
            Severity::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SourceLocation {
    pub file: String,
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<SourceLocation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum DocSpan {
    Text(String),
    Code(String),
}

/// A documentation comment reduced to paragraphs of text and inline code.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocComment {
    pub paragraphs: Vec<Vec<DocSpan>>,
}

impl DocComment {
    pub fn plain_text(&self) -> String {
        self.paragraphs
            .iter()
            .map(|p| {
                p.iter()
                    .map(|span| match span {
                        DocSpan::Text(t) | DocSpan::Code(t) => t.as_str(),
                    })
                    .collect::<String>()
            })
            .collect::<Vec<_>>()
            .join("\n\n")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<&str> for Scalar {
    fn from(s: &str) -> Self {
        Scalar::Text(s.to_string())
    }
}

impl From<String> for Scalar {
    fn from(s: String) -> Self {
        Scalar::Text(s)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::Int(v)
    }
}

impl From<bool> for Scalar {
    fn from(v: bool) -> Self {
        Scalar::Bool(v)
    }
}

impl Scalar {
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Scalar::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Scalar::Int(v) => Some(*v),
            _ => None,
        }
    }
}

pub type Extra = BTreeMap<String, Scalar>;

/// Extra key under which the sibling-ordering disambiguator is recorded.
pub const DISAMBIGUATOR_KEY: &str = "disambiguator";

#[derive(Debug, Clone, PartialEq)]
pub struct Entity {
    pub token: Token,
    pub name: String,
    pub kind: EntityKind,
    pub type_kind: Option<TypeKind>,
    pub method_kind: Option<MethodKind>,
    pub accessibility: Option<Accessibility>,
    pub is_static: bool,
    pub doc_comment: Option<DocComment>,
    pub diagnostics: Vec<Diagnostic>,
    pub instance_member_count: u32,
    pub static_member_count: u32,
    pub extra: Extra,
}

impl Entity {
    pub fn new(token: Token, kind: EntityKind, name: impl Into<String>) -> Self {
        Entity {
            token,
            name: name.into(),
            kind,
            type_kind: None,
            method_kind: None,
            accessibility: None,
            is_static: false,
            doc_comment: None,
            diagnostics: Vec::new(),
            instance_member_count: 0,
            static_member_count: 0,
            extra: Extra::new(),
        }
    }

    pub fn member_count(&self) -> u32 {
        self.instance_member_count + self.static_member_count
    }

    pub fn has_severity(&self, severity: Severity) -> bool {
        self.diagnostics.iter().any(|d| d.severity == severity)
    }

    pub fn disambiguator(&self) -> &str {
        self.extra
            .get(DISAMBIGUATOR_KEY)
            .and_then(Scalar::as_text)
            .unwrap_or("")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelationId {
    #[serde(rename = "declares")]
    Declares,
    #[serde(rename = "dependsOn")]
    DependsOn,
    #[serde(rename = "inheritsFrom")]
    InheritsFrom,
    #[serde(rename = "returns")]
    Returns,
    #[serde(rename = "typeOf")]
    TypeOf,
}

impl RelationId {
    /// Sorted by id.
    pub const ALL: [RelationId; 5] = [
        RelationId::Declares,
        RelationId::DependsOn,
        RelationId::InheritsFrom,
        RelationId::Returns,
        RelationId::TypeOf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationId::Declares => "declares",
            RelationId::DependsOn => "dependsOn",
            RelationId::InheritsFrom => "inheritsFrom",
            RelationId::Returns => "returns",
            RelationId::TypeOf => "typeOf",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        RelationId::ALL.into_iter().find(|r| r.as_str() == s)
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub type Edge = (Token, Token);

#[derive(Debug, Clone, PartialEq)]
pub struct EntityGraph {
    pub schema_version: String,
    pub entities: BTreeMap<Token, Entity>,
    relations: BTreeMap<RelationId, BTreeSet<Edge>>,
}

impl Default for EntityGraph {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("no entity with token {0}")]
    NotFound(Token),
    #[error("entity {token} is a {actual}, expected a {expected}")]
    WrongKind {
        token: Token,
        expected: EntityKind,
        actual: EntityKind,
    },
}

impl EntityGraph {
    pub fn new() -> Self {
        EntityGraph {
            schema_version: SCHEMA_VERSION.to_string(),
            entities: BTreeMap::new(),
            relations: RelationId::ALL
                .into_iter()
                .map(|r| (r, BTreeSet::new()))
                .collect(),
        }
    }

    pub fn insert(&mut self, entity: Entity) -> Option<Entity> {
        self.entities.insert(entity.token.clone(), entity)
    }

    pub fn entity(&self, token: &Token) -> Option<&Entity> {
        self.entities.get(token)
    }

    pub fn add_edge(&mut self, relation: RelationId, source: Token, target: Token) -> bool {
        self.relations
            .entry(relation)
            .or_default()
            .insert((source, target))
    }

    pub fn edges(&self, relation: RelationId) -> &BTreeSet<Edge> {
        self.relations
            .get(&relation)
            .expect("every relation is always present")
    }

    pub fn relations(&self) -> impl Iterator<Item = (RelationId, &BTreeSet<Edge>)> {
        self.relations.iter().map(|(r, e)| (*r, e))
    }

    pub fn edge_count(&self) -> usize {
        self.relations.values().map(BTreeSet::len).sum()
    }

    /// Outgoing edges of `source` in `relation`, in target order.
    pub fn targets<'a>(
        &'a self,
        relation: RelationId,
        source: &'a Token,
    ) -> impl Iterator<Item = &'a Token> + 'a {
        self.edges(relation)
            .range((source.clone(), Token::root(0))..)
            .take_while(move |(s, _)| s == source)
            .map(|(_, t)| t)
    }

    pub fn roots(&self) -> impl Iterator<Item = &Entity> {
        self.entities.values().filter(|e| e.token.is_root())
    }

    /// `declares` children ordered by (kind rank, name, disambiguator), the
    /// ordering tokens are assigned by.
    pub fn children(&self, token: &Token) -> Result<Vec<&Entity>, ModelError> {
        if !self.entities.contains_key(token) {
            return Err(ModelError::NotFound(token.clone()));
        }
        let mut kids: Vec<&Entity> = self
            .targets(RelationId::Declares, token)
            .filter_map(|t| self.entities.get(t))
            .collect();
        kids.sort_by(|a, b| {
            (a.kind.rank(), &a.name, a.disambiguator(), &a.token).cmp(&(
                b.kind.rank(),
                &b.name,
                b.disambiguator(),
                &b.token,
            ))
        });
        Ok(kids)
    }

    /// (instance, static) member counts recomputed from `declares` children.
    pub fn member_counts(&self, token: &Token) -> Result<(u32, u32), ModelError> {
        let entity = self
            .entities
            .get(token)
            .ok_or_else(|| ModelError::NotFound(token.clone()))?;
        if entity.kind != EntityKind::Type {
            return Err(ModelError::WrongKind {
                token: token.clone(),
                expected: EntityKind::Type,
                actual: entity.kind,
            });
        }
        Ok(self.recount_members(token))
    }

    fn recount_members(&self, token: &Token) -> (u32, u32) {
        let mut counts = (0, 0);
        for child in self
            .targets(RelationId::Declares, token)
            .filter_map(|t| self.entities.get(t))
            .filter(|e| e.kind.is_member())
        {
            if child.is_static {
                counts.1 += 1;
            } else {
                counts.0 += 1;
            }
        }
        counts
    }

    /// Recomputes and stores member counts on every Type entity.
    pub fn refresh_member_counts(&mut self) {
        let counts: Vec<(Token, (u32, u32))> = self
            .entities
            .values()
            .filter(|e| e.kind == EntityKind::Type)
            .map(|e| (e.token.clone(), self.recount_members(&e.token)))
            .collect();
        for (token, (instance, stat)) in counts {
            if let Some(e) = self.entities.get_mut(&token) {
                e.instance_member_count = instance;
                e.static_member_count = stat;
            }
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate_graph(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    KeyTokenMismatch { key: Token, token: Token },
    MissingEndpoint { relation: RelationId, source: Token, target: Token },
    MissingParentEntity { token: Token },
    MultipleParents { child: Token, parents: Vec<Token> },
    ParentMismatch { child: Token, declared_by: Token },
    UndeclaredChild { token: Token },
    DeclaresCycle { tokens: Vec<Token> },
    NonSolutionRoot { token: Token, kind: EntityKind },
    RankNotIncreasing { parent: Token, child: Token },
    DependencyCycle { tokens: Vec<Token> },
    TypeKindMismatch { token: Token },
    MethodKindMismatch { token: Token },
    MemberCountMismatch { token: Token, stored: (u32, u32), actual: (u32, u32) },
    StaticClassWithInstanceMembers { token: Token },
    NonFiniteExtra { token: Token, key: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::KeyTokenMismatch { key, token } => {
                write!(f, "entity stored under {key} carries token {token}")
            }
            Violation::MissingEndpoint { relation, source, target } => {
                write!(f, "{relation} edge {source} -> {target} references a missing entity")
            }
            Violation::MissingParentEntity { token } => {
                write!(f, "entity {token} has no entity at its parent token")
            }
            Violation::MultipleParents { child, parents } => {
                write!(f, "entity {child} is declared by {} parents: {}", parents.len(), join(parents))
            }
            Violation::ParentMismatch { child, declared_by } => {
                write!(f, "entity {child} is declared by {declared_by}, not by its token parent")
            }
            Violation::UndeclaredChild { token } => {
                write!(f, "entity {token} has no declares edge from its parent")
            }
            Violation::DeclaresCycle { tokens } => write!(f, "declares cycle through {}", join(tokens)),
            Violation::NonSolutionRoot { token, kind } => {
                write!(f, "declares root {token} is a {kind}, not a solution")
            }
            Violation::RankNotIncreasing { parent, child } => {
                write!(f, "declares edge {parent} -> {child} does not increase kind rank")
            }
            Violation::DependencyCycle { tokens } => {
                write!(f, "dependsOn cycle between {}", join(tokens))
            }
            Violation::TypeKindMismatch { token } => {
                write!(f, "entity {token}: typeKind must be present exactly on types")
            }
            Violation::MethodKindMismatch { token } => {
                write!(f, "entity {token}: methodKind must be present exactly on methods")
            }
            Violation::MemberCountMismatch { token, stored, actual } => write!(
                f,
                "entity {token}: stored member counts {stored:?} differ from declared members {actual:?}"
            ),
            Violation::StaticClassWithInstanceMembers { token } => {
                write!(f, "static class {token} has instance members")
            }
            Violation::NonFiniteExtra { token, key } => {
                write!(f, "entity {token}: extra value {key:?} is not finite")
            }
        }
    }
}

fn join(tokens: &[Token]) -> String {
    tokens.iter().map(Token::to_string).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every graph invariant and reports all violations. Never aborts.
pub fn validate_graph(g: &EntityGraph) -> ValidationReport {
    let mut out = Vec::new();
    let entities = &g.entities;

    for (key, e) in entities {
        if *key != e.token {
            out.push(Violation::KeyTokenMismatch { key: key.clone(), token: e.token.clone() });
        }
        if e.type_kind.is_some() != (e.kind == EntityKind::Type) {
            out.push(Violation::TypeKindMismatch { token: key.clone() });
        }
        if e.method_kind.is_some() != (e.kind == EntityKind::Method) {
            out.push(Violation::MethodKindMismatch { token: key.clone() });
        }
        for (k, v) in &e.extra {
            if let Scalar::Float(x) = v {
                if !x.is_finite() {
                    out.push(Violation::NonFiniteExtra { token: key.clone(), key: k.clone() });
                }
            }
        }
    }

    for (relation, edges) in g.relations() {
        for (s, t) in edges {
            if !entities.contains_key(s) || !entities.contains_key(t) {
                out.push(Violation::MissingEndpoint {
                    relation,
                    source: s.clone(),
                    target: t.clone(),
                });
            }
        }
    }

    // declares structure
    let mut parents: BTreeMap<&Token, Vec<&Token>> = BTreeMap::new();
    for (s, t) in g.edges(RelationId::Declares) {
        if let (Some(ps), Some(pt)) = (entities.get(s), entities.get(t)) {
            parents.entry(t).or_default().push(s);
            if pt.kind.rank() <= ps.kind.rank() {
                out.push(Violation::RankNotIncreasing { parent: s.clone(), child: t.clone() });
            }
        }
    }
    for (token, e) in entities {
        let declared_by = parents.get(token).map(Vec::as_slice).unwrap_or(&[]);
        if declared_by.len() > 1 {
            out.push(Violation::MultipleParents {
                child: token.clone(),
                parents: declared_by.iter().map(|t| (*t).clone()).collect(),
            });
        }
        match token.parent() {
            None => {
                if let Some(p) = declared_by.first() {
                    out.push(Violation::ParentMismatch {
                        child: token.clone(),
                        declared_by: (*p).clone(),
                    });
                } else if e.kind != EntityKind::Solution {
                    out.push(Violation::NonSolutionRoot { token: token.clone(), kind: e.kind });
                }
            }
            Some(parent) => {
                if !entities.contains_key(&parent) {
                    out.push(Violation::MissingParentEntity { token: token.clone() });
                } else if declared_by.is_empty() {
                    out.push(Violation::UndeclaredChild { token: token.clone() });
                } else if let Some(p) = declared_by.iter().find(|p| ***p != parent) {
                    out.push(Violation::ParentMismatch {
                        child: token.clone(),
                        declared_by: (*p).clone(),
                    });
                }
            }
        }
    }
    for cycle in cycles(entities.keys(), g.edges(RelationId::Declares), |_| true) {
        out.push(Violation::DeclaresCycle { tokens: cycle });
    }
    let is_package_like = |t: &Token| {
        entities
            .get(t)
            .is_some_and(|e| matches!(e.kind, EntityKind::Project | EntityKind::Package))
    };
    for cycle in cycles(entities.keys(), g.edges(RelationId::DependsOn), is_package_like) {
        out.push(Violation::DependencyCycle { tokens: cycle });
    }

    for (token, e) in entities {
        let actual = g.recount_members(token);
        let stored = (e.instance_member_count, e.static_member_count);
        if e.kind == EntityKind::Type {
            if stored != actual {
                out.push(Violation::MemberCountMismatch { token: token.clone(), stored, actual });
            }
            if e.is_static && e.type_kind == Some(TypeKind::Class) && e.instance_member_count > 0 {
                out.push(Violation::StaticClassWithInstanceMembers { token: token.clone() });
            }
        } else if stored != (0, 0) {
            out.push(Violation::MemberCountMismatch { token: token.clone(), stored, actual: (0, 0) });
        }
    }

    ValidationReport { violations: out }
}

/// Strongly connected components with more than one node (or a self loop),
/// over the subgraph induced by `keep`. Iterative Tarjan; deterministic order.
fn cycles<'a>(
    nodes: impl Iterator<Item = &'a Token>,
    edges: &BTreeSet<Edge>,
    keep: impl Fn(&Token) -> bool,
) -> Vec<Vec<Token>> {
    let nodes: Vec<&Token> = nodes.filter(|t| keep(t)).collect();
    let index_of: BTreeMap<&Token, usize> = nodes.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let mut adjacency = vec![Vec::new(); nodes.len()];
    let mut self_loops = BTreeSet::new();
    for (s, t) in edges {
        if let (Some(&a), Some(&b)) = (index_of.get(s), index_of.get(t)) {
            if a == b {
                self_loops.insert(a);
            }
            adjacency[a].push(b);
        }
    }

    const UNVISITED: usize = usize::MAX;
    let n = nodes.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next = 0;
    let mut found = Vec::new();

    for start in 0..n {
        if index[start] != UNVISITED {
            continue;
        }
        let mut work: Vec<(usize, usize)> = vec![(start, 0)];
        index[start] = next;
        low[start] = next;
        next += 1;
        stack.push(start);
        on_stack[start] = true;
        while let Some(&mut (v, ref mut edge)) = work.last_mut() {
            if *edge < adjacency[v].len() {
                let w = adjacency[v][*edge];
                *edge += 1;
                if index[w] == UNVISITED {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(parent, _)) = work.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    if component.len() > 1 || self_loops.contains(&v) {
                        let mut tokens: Vec<Token> =
                            component.into_iter().map(|i| nodes[i].clone()).collect();
                        tokens.sort();
                        found.push(tokens);
                    }
                }
            }
        }
    }
    found.sort();
    found
}
