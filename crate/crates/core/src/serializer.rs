//! Canonical JSON interchange for [`EntityGraph`].
//!
//! Document shape:
//!
//! ```json
//! {
//!   "schemaVersion": "codecarta-graph/1",
//!   "entities": { "0": { "name": "...", "kind": "solution", ... }, "0.0": { ... } },
//!   "relations": { "declares": [["0", "0.0"]], "dependsOn": [], ... }
//! }
//! ```
//!
//! Entities are keyed by dotted token text in token order; relations are keyed
//! by id in id order and each holds `[source, target]` pairs sorted by
//! (source, target). Serializing the same graph always yields the same bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    validate_graph, Accessibility, Diagnostic, DocComment, Entity, EntityGraph, EntityKind, Extra,
    MethodKind, RelationId, TypeKind, ValidationReport, SCHEMA_VERSION,
};
use crate::token::Token;

#[derive(Debug, Error)]
pub enum SerializeError {
    #[error("refusing to serialize an invalid graph: {0}")]
    Invalid(ValidationReport),
    #[error("unsupported schema version {found:?} (expected {SCHEMA_VERSION:?})")]
    Version { found: String },
    #[error("malformed document at byte offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("document structure error at {path}: {message}")]
    Structure { path: String, message: String },
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct WireGraph {
    schema_version: String,
    entities: BTreeMap<Token, WireEntity>,
    #[serde(default)]
    relations: BTreeMap<RelationId, Vec<(Token, Token)>>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct WireEntity {
    name: String,
    kind: EntityKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    type_kind: Option<TypeKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    method_kind: Option<MethodKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    accessibility: Option<Accessibility>,
    #[serde(default)]
    is_static: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    doc_comment: Option<DocComment>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    diagnostics: Vec<Diagnostic>,
    #[serde(default)]
    instance_member_count: u32,
    #[serde(default)]
    static_member_count: u32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    extra: Extra,
}

pub fn serialize(g: &EntityGraph) -> Result<Vec<u8>, SerializeError> {
    let report = validate_graph(g);
    if !report.is_valid() {
        return Err(SerializeError::Invalid(report));
    }
    let wire = WireGraph {
        schema_version: g.schema_version.clone(),
        entities: g
            .entities
            .iter()
            .map(|(token, e)| {
                (
                    token.clone(),
                    WireEntity {
                        name: e.name.clone(),
                        kind: e.kind,
                        type_kind: e.type_kind,
                        method_kind: e.method_kind.clone(),
                        accessibility: e.accessibility,
                        is_static: e.is_static,
                        doc_comment: e.doc_comment.clone(),
                        diagnostics: e.diagnostics.clone(),
                        instance_member_count: e.instance_member_count,
                        static_member_count: e.static_member_count,
                        extra: e.extra.clone(),
                    },
                )
            })
            .collect(),
        relations: g
            .relations()
            .map(|(r, edges)| (r, edges.iter().cloned().collect()))
            .collect(),
    };
    let mut bytes = serde_json::to_vec_pretty(&wire).expect("graph documents always serialize");
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn deserialize(bytes: &[u8]) -> Result<EntityGraph, SerializeError> {
    let value: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| SerializeError::Parse {
        offset: byte_offset(bytes, e.line(), e.column()),
        message: e.to_string(),
    })?;
    match value.get("schemaVersion") {
        Some(serde_json::Value::String(v)) if v == SCHEMA_VERSION => {}
        Some(serde_json::Value::String(v)) => return Err(SerializeError::Version { found: v.clone() }),
        _ => {
            return Err(SerializeError::Structure {
                path: "schemaVersion".into(),
                message: "missing or not a string".into(),
            })
        }
    }
    let wire: WireGraph = serde_path_to_error::deserialize(value).map_err(|e| SerializeError::Structure {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;

    let mut g = EntityGraph::new();
    g.schema_version = wire.schema_version;
    for (token, w) in wire.entities {
        g.insert(Entity {
            token,
            name: w.name,
            kind: w.kind,
            type_kind: w.type_kind,
            method_kind: w.method_kind,
            accessibility: w.accessibility,
            is_static: w.is_static,
            doc_comment: w.doc_comment,
            diagnostics: w.diagnostics,
            instance_member_count: w.instance_member_count,
            static_member_count: w.static_member_count,
            extra: w.extra,
        });
    }
    for (relation, edges) in wire.relations {
        for (s, t) in edges {
            g.add_edge(relation, s, t);
        }
    }
    let report = validate_graph(&g);
    if !report.is_valid() {
        return Err(SerializeError::Invalid(report));
    }
    Ok(g)
}

/// Converts serde_json's 1-based line/column into a byte offset.
fn byte_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    let mut offset = 0;
    for (i, chunk) in bytes.split(|b| *b == b'\n').enumerate() {
        if i + 1 == line {
            return (offset + column.saturating_sub(1)).min(bytes.len());
        }
        offset += chunk.len() + 1;
    }
    bytes.len()
}
