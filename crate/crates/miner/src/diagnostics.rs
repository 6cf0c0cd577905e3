//! Newline-delimited diagnostics reports and their attachment to entities.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use codecarta_core::{Diagnostic, EntityGraph, EntityKind, Scalar, Severity, SourceLocation, Token};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

/// One line of a report.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct DiagnosticRecord {
    pub severity: String,
    pub code: String,
    pub message: String,
    #[serde(default)]
    pub file: Option<String>,
    #[serde(default)]
    pub line: Option<u32>,
    #[serde(default)]
    pub column: Option<u32>,
}

fn severity(s: &str) -> Option<Severity> {
    match s {
        "error" => Some(Severity::Error),
        "warning" => Some(Severity::Warning),
        "hint" => Some(Severity::Hint),
        _ => None,
    }
}

/// Parses a report; blank lines are skipped. Line numbers in errors are 1-based.
pub fn parse_report(text: &str) -> Result<Vec<DiagnosticRecord>, DiagnosticsError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: DiagnosticRecord =
            serde_json::from_str(line).map_err(|e| DiagnosticsError::Format { line: i + 1, message: e.to_string() })?;
        if severity(&record.severity).is_none() {
            return Err(DiagnosticsError::Format {
                line: i + 1,
                message: format!("unknown severity {:?}; expected error, warning or hint", record.severity),
            });
        }
        if record.file.is_some() != record.line.is_some() {
            return Err(DiagnosticsError::Format { line: i + 1, message: "file and line must be given together".into() });
        }
        out.push(record);
    }
    Ok(out)
}

/// Source extent of an entity as recorded in its `extra` map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntitySpan {
    pub file: String,
    pub start: (u32, u32),
    pub end: (u32, u32),
}

pub fn entity_span(extra: &BTreeMap<String, Scalar>) -> Option<EntitySpan> {
    let int = |k: &str| extra.get(k).and_then(Scalar::as_int).map(|v| v as u32);
    Some(EntitySpan {
        file: extra.get("file")?.as_text()?.to_string(),
        start: (int("startLine")?, int("startColumn").unwrap_or(1)),
        end: (int("endLine")?, int("endColumn").unwrap_or(u32::MAX)),
    })
}

/// Entity spans grouped by file for repeated lookups.
pub struct SpanIndex {
    by_file: BTreeMap<String, Vec<(EntitySpan, Token)>>,
    projects: Vec<(String, Token)>,
    fallback: Option<Token>,
}

impl SpanIndex {
    pub fn new(g: &EntityGraph) -> Self {
        let mut by_file: BTreeMap<String, Vec<(EntitySpan, Token)>> = BTreeMap::new();
        let mut projects = Vec::new();
        for e in g.entities.values() {
            if e.kind == EntityKind::Project {
                if let Some(dir) = e.extra.get("dir").and_then(Scalar::as_text) {
                    projects.push((dir.to_string(), e.token.clone()));
                }
                continue;
            }
            if let Some(span) = entity_span(&e.extra) {
                by_file.entry(span.file.clone()).or_default().push((span, e.token.clone()));
            }
        }
        let fallback = g
            .entities
            .values()
            .find(|e| e.kind == EntityKind::Project)
            .or_else(|| g.roots().next())
            .map(|e| e.token.clone());
        SpanIndex { by_file, projects, fallback }
    }

    /// Deepest entity whose span contains the position, else the project
    /// owning the file, else the first project, else the first solution.
    pub fn target(&self, location: Option<(&str, u32, u32)>) -> Option<Token> {
        if let Some((file, line, column)) = location {
            let pos = (line, column);
            let best = self
                .by_file
                .get(file)
                .into_iter()
                .flatten()
                .filter(|(s, _)| s.start <= pos && pos <= s.end)
                .max_by(|a, b| a.1.depth().cmp(&b.1.depth()).then_with(|| b.1.cmp(&a.1)));
            if let Some((_, t)) = best {
                return Some(t.clone());
            }
            let owner = self
                .projects
                .iter()
                .filter(|(dir, _)| dir.is_empty() || file == dir || file.starts_with(&format!("{dir}/")))
                .max_by_key(|(dir, _)| dir.len());
            if let Some((_, t)) = owner {
                return Some(t.clone());
            }
        }
        self.fallback.clone()
    }
}

/// Repository-relative form of a reported path.
pub fn normalize_file(file: &str, root: Option<&Path>) -> String {
    let mut f = file.replace('\\', "/");
    if let Some(root) = root {
        let r = root.to_string_lossy().replace('\\', "/");
        if let Some(rest) = f.strip_prefix(&format!("{}/", r.trim_end_matches('/'))) {
            f = rest.to_string();
        }
    }
    while let Some(rest) = f.strip_prefix("./") {
        f = rest.to_string();
    }
    f
}

/// Attaches every record; returns how many were attached. A record is only
/// dropped when the graph has no entities at all.
pub fn attach(g: &mut EntityGraph, records: &[DiagnosticRecord], root: Option<&Path>) -> usize {
    let index = SpanIndex::new(g);
    let mut attached = 0;
    for r in records {
        let file = r.file.as_deref().map(|f| normalize_file(f, root));
        let location = file.as_deref().map(|f| (f, r.line.unwrap_or(1), r.column.unwrap_or(1)));
        let Some(token) = index.target(location) else { continue };
        let Some(e) = g.entities.get_mut(&token) else { continue };
        e.diagnostics.push(Diagnostic {
            severity: severity(&r.severity).unwrap_or(Severity::Hint),
            code: r.code.clone(),
            message: r.message.clone(),
            location: file.map(|file| SourceLocation { file, line: r.line.unwrap_or(1), column: r.column.unwrap_or(1) }),
        });
        attached += 1;
    }
    attached
}

/// Reads a report from disk and attaches it. Paths inside the report may be
/// relative to `root` or absolute below it.
pub fn ingest_diagnostics(mut g: EntityGraph, report: &Path, root: Option<&Path>) -> Result<EntityGraph, DiagnosticsError> {
    let text = fs::read_to_string(report).map_err(|e| DiagnosticsError::Io { path: report.to_path_buf(), source: e })?;
    let records = parse_report(&text)?;
    attach(&mut g, &records, root);
    Ok(g)
}
