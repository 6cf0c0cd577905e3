//! Random fixtures and reference oracles shared by the integration tests.
#![allow(dead_code)]

pub mod oracle;
pub mod props;

use codecarta_core::model::DocSpan;
use codecarta_core::{
    Accessibility, Diagnostic, DocComment, Entity, EntityGraph, EntityKind, MethodKind, RelationId, Scalar, Severity,
    SourceLocation, Token, TypeKind,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub const NAMES: &[&str] = &[
    "Api", "api", "Service", "ProjectService", "Item", "IEntity", "Zeta", "parse", "Parse", "render", "Vec", "Map",
    "node", "Node", "ÄÖ", "x_1", "Item2", "core", "io", "Error",
];

pub const ACCESS: [Accessibility; 6] = [
    Accessibility::Public,
    Accessibility::Internal,
    Accessibility::Protected,
    Accessibility::ProtectedInternal,
    Accessibility::PrivateProtected,
    Accessibility::Private,
];

pub const TYPE_KINDS: [TypeKind; 5] =
    [TypeKind::Class, TypeKind::Struct, TypeKind::Enum, TypeKind::Interface, TypeKind::Delegate];

pub fn method_kinds() -> Vec<MethodKind> {
    vec![
        MethodKind::Ordinary,
        MethodKind::Constructor,
        MethodKind::Getter,
        MethodKind::Setter,
        MethodKind::Operator,
        MethodKind::Other("finalizer".into()),
    ]
}

pub fn random_name<R: Rng>(rng: &mut R) -> String {
    NAMES.choose(rng).unwrap().to_string()
}

/// Parent indices for a random forest of `n` nodes; `parents[i] < i`.
pub fn random_parents<R: Rng>(rng: &mut R, n: usize, roots: usize) -> Vec<Option<usize>> {
    let mut parents = Vec::with_capacity(n);
    for i in 0..n {
        if i < roots.max(1) {
            parents.push(None);
        } else if rng.gen_bool(0.6) {
            // bias toward recent nodes for depth
            let lo = i.saturating_sub(8);
            parents.push(Some(rng.gen_range(lo..i)));
        } else {
            parents.push(Some(rng.gen_range(0..i)));
        }
    }
    parents
}

fn child_kind<R: Rng>(rng: &mut R, parent: EntityKind) -> Option<EntityKind> {
    use EntityKind::*;
    let options: &[EntityKind] = match parent {
        // solutions only ever hold projects and packages
        Solution => &[Project, Project, Project, Package],
        Project => &[Namespace, Type, Type, Package],
        Package | Namespace => &[Type, Type, Field, Method],
        Type => &[Field, Method, Method, Property, Event],
        _ => return None,
    };
    Some(*options.choose(rng).unwrap())
}

fn random_doc<R: Rng>(rng: &mut R) -> DocComment {
    let paragraphs = (0..rng.gen_range(1..3))
        .map(|_| {
            let mut spans = vec![DocSpan::Text(format!("Adds {} numbers.", random_name(rng)))];
            if rng.gen_bool(0.3) {
                spans.push(DocSpan::Code(random_name(rng)));
            }
            spans
        })
        .collect();
    DocComment { paragraphs }
}

fn random_diagnostics<R: Rng>(rng: &mut R) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for _ in 0..rng.gen_range(0..3) {
        if rng.gen_bool(0.5) {
            continue;
        }
        let severity = *[Severity::Hint, Severity::Warning, Severity::Error].choose(rng).unwrap();
        out.push(Diagnostic {
            severity,
            code: format!("E{}", rng.gen_range(0..999)),
            message: "something \"odd\"\n here".into(),
            location: rng.gen_bool(0.5).then(|| SourceLocation {
                file: "src/lib.rs".into(),
                line: rng.gen_range(1..500),
                column: rng.gen_range(1..80),
            }),
        });
    }
    out
}

/// A random graph that passes validation. Roughly `n` entities.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize) -> EntityGraph {
    let mut g = EntityGraph::new();
    let roots = if rng.gen_bool(0.2) { 2 } else { 1 };
    let mut next_child: Vec<u32> = Vec::new();
    let mut tokens: Vec<Token> = Vec::new();
    let mut kinds: Vec<EntityKind> = Vec::new();
    let mut static_class: Vec<bool> = Vec::new();
    for r in 0..roots {
        let t = Token::root(r as u32);
        let mut e = Entity::new(t.clone(), EntityKind::Solution, random_name(rng));
        e.diagnostics = random_diagnostics(rng);
        g.insert(e);
        tokens.push(t);
        kinds.push(EntityKind::Solution);
        next_child.push(0);
        static_class.push(false);
    }
    let mut attempts = 0;
    while tokens.len() < n.max(roots) && attempts < n * 20 {
        attempts += 1;
        let p = if rng.gen_bool(0.5) { rng.gen_range(tokens.len().saturating_sub(6)..tokens.len()) } else { rng.gen_range(0..tokens.len()) };
        let Some(kind) = child_kind(rng, kinds[p]) else { continue };
        let token = tokens[p].child(next_child[p]);
        next_child[p] += 1;
        let mut e = Entity::new(token.clone(), kind, random_name(rng));
        let mut is_static_class = false;
        match kind {
            EntityKind::Type => {
                let tk = *TYPE_KINDS.choose(rng).unwrap();
                e.type_kind = Some(tk);
                e.is_static = tk == TypeKind::Class && rng.gen_bool(0.2);
                is_static_class = e.is_static;
            }
            EntityKind::Method => {
                e.method_kind = Some(method_kinds().choose(rng).unwrap().clone());
            }
            _ => {}
        }
        if kind.is_member() {
            e.is_static = static_class[p] || rng.gen_bool(0.3);
        }
        if kind.is_member() || kind == EntityKind::Type {
            e.accessibility = Some(*ACCESS.choose(rng).unwrap());
        }
        if rng.gen_bool(0.3) {
            e.doc_comment = Some(random_doc(rng));
        }
        e.diagnostics = random_diagnostics(rng);
        if rng.gen_bool(0.2) {
            e.extra.insert("startLine".into(), Scalar::Int(rng.gen_range(-5..5000)));
            e.extra.insert("ratio".into(), Scalar::Float(rng.gen_range(-1.0..1.0)));
            e.extra.insert("stub".into(), Scalar::Bool(rng.gen()));
            e.extra.insert("file".into(), Scalar::Text(format!("src/{}.rs", random_name(rng))));
        }
        if rng.gen_bool(0.1) {
            e.extra.insert("disambiguator".into(), Scalar::Text(format!("(i32)/{}", rng.gen_range(0..3))));
        }
        g.add_edge(RelationId::Declares, tokens[p].clone(), token.clone());
        g.insert(e);
        tokens.push(token);
        kinds.push(kind);
        next_child.push(0);
        static_class.push(is_static_class);
    }
    let m = tokens.len();
    for _ in 0..m / 2 {
        let (a, b) = (rng.gen_range(0..m), rng.gen_range(0..m));
        let relation = *[RelationId::TypeOf, RelationId::Returns, RelationId::InheritsFrom].choose(rng).unwrap();
        g.add_edge(relation, tokens[a].clone(), tokens[b].clone());
    }
    let packages: Vec<usize> = (0..m)
        .filter(|&i| matches!(kinds[i], EntityKind::Project | EntityKind::Package))
        .collect();
    for _ in 0..packages.len() {
        if packages.len() < 2 {
            break;
        }
        let mut pair = packages.choose_multiple(rng, 2).copied().collect::<Vec<_>>();
        pair.sort();
        // only "later depends on earlier": acyclic by construction
        g.add_edge(RelationId::DependsOn, tokens[pair[1]].clone(), tokens[pair[0]].clone());
    }
    g.refresh_member_counts();
    g
}
