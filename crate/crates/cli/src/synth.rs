//! Synthetic Rust workspaces of a requested size, with a ledger of what
//! mining them must produce.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use codecarta_core::{EntityGraph, EntityKind, RelationId, Severity, TypeKind};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const LEDGER_FILE: &str = "ledger.json";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.jsonl";

/// Name of the registry dependency some projects declare.
const EXTERNAL_PACKAGE: &str = "serde";

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub projects: usize,
    pub target_nodes: usize,
    pub seed: u64,
    /// Chance that a type carries an error diagnostic.
    pub error_rate: f64,
    /// Chance that a type carries a warning diagnostic.
    pub warning_rate: f64,
}

impl SynthConfig {
    pub fn new(projects: usize, target_nodes: usize, seed: u64) -> Self {
        SynthConfig { projects, target_nodes, seed, error_rate: 0.02, warning_rate: 0.05 }
    }

    pub fn check(&self) -> Result<(), CliError> {
        if self.projects == 0 {
            return Err(CliError::Synth("projects must be at least 1".into()));
        }
        if self.target_nodes < self.projects + 1 {
            return Err(CliError::Synth(format!(
                "target nodes {} cannot hold a solution and {} projects; need at least {}",
                self.target_nodes,
                self.projects,
                self.projects + 1
            )));
        }
        for (name, rate) in [("error rate", self.error_rate), ("warning rate", self.warning_rate)] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(CliError::Synth(format!("{name} must lie in [0, 1], got {rate}")));
            }
        }
        Ok(())
    }
}

/// What mining the fixture yields.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Ledger {
    pub seed: u64,
    pub projects: usize,
    pub nodes: usize,
    pub entities: BTreeMap<EntityKind, usize>,
    pub type_kinds: BTreeMap<TypeKind, usize>,
    pub relations: BTreeMap<RelationId, usize>,
    pub diagnostics: BTreeMap<Severity, usize>,
    pub documented: usize,
}

impl Ledger {
    /// The same tallies taken from a mined graph.
    pub fn observe(g: &EntityGraph) -> Ledger {
        let mut l = Ledger { nodes: g.entities.len(), ..Ledger::default() };
        for e in g.entities.values() {
            *l.entities.entry(e.kind).or_default() += 1;
            if let Some(tk) = e.type_kind {
                *l.type_kinds.entry(tk).or_default() += 1;
            }
            for d in &e.diagnostics {
                *l.diagnostics.entry(d.severity).or_default() += 1;
            }
            l.documented += usize::from(e.doc_comment.is_some());
        }
        for (r, edges) in g.relations() {
            if !edges.is_empty() {
                l.relations.insert(r, edges.len());
            }
        }
        l.projects = l.entities.get(&EntityKind::Project).copied().unwrap_or(0);
        l
    }

    /// Differences against an observed ledger, ignoring `seed`.
    pub fn differences(&self, observed: &Ledger) -> Vec<String> {
        fn diff<K: Ord + std::fmt::Debug>(what: &str, a: &BTreeMap<K, usize>, b: &BTreeMap<K, usize>, out: &mut Vec<String>) {
            let keys: BTreeSet<&K> = a.keys().chain(b.keys()).collect();
            for k in keys {
                let (x, y) = (a.get(k).copied().unwrap_or(0), b.get(k).copied().unwrap_or(0));
                if x != y {
                    out.push(format!("{what} {k:?}: expected {x}, mined {y}"));
                }
            }
        }
        let mut out = Vec::new();
        if self.nodes != observed.nodes {
            out.push(format!("nodes: expected {}, mined {}", self.nodes, observed.nodes));
        }
        if self.projects != observed.projects {
            out.push(format!("projects: expected {}, mined {}", self.projects, observed.projects));
        }
        diff("entities", &self.entities, &observed.entities, &mut out);
        diff("type kinds", &self.type_kinds, &observed.type_kinds, &mut out);
        diff("relations", &self.relations, &observed.relations, &mut out);
        diff("diagnostics", &self.diagnostics, &observed.diagnostics, &mut out);
        if self.documented != observed.documented {
            out.push(format!("documented: expected {}, mined {}", self.documented, observed.documented));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixture {
    /// Relative paths and contents, in write order.
    pub files: Vec<(PathBuf, String)>,
    pub ledger: Ledger,
}

impl Fixture {
    /// Writes the tree, `ledger.json` and `diagnostics.jsonl` into `dir`,
    /// which must be missing or empty.
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        if dir.exists() {
            let mut entries = fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
            if entries.next().is_some() {
                return Err(CliError::Synth(format!("{} is not empty", dir.display())));
            }
        }
        for (path, text) in &self.files {
            let full = dir.join(path);
            if let Some(parent) = full.parent() {
                fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
            }
            fs::write(&full, text).map_err(|e| CliError::io(&full, e))?;
        }
        Ok(())
    }

    pub fn diagnostics(&self) -> &str {
        self.files
            .iter()
            .find(|(p, _)| p == Path::new(DIAGNOSTICS_FILE))
            .map_or("", |(_, text)| text.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Class,
    Copy,
    Enum,
    Trait,
}

#[derive(Debug, Clone)]
struct TypeRef {
    project: usize,
    module: usize,
    name: String,
    shape: Shape,
}

/// Lines of one source file.
#[derive(Default)]
struct Source {
    head: Vec<String>,
    body: Vec<String>,
    imports: BTreeSet<String>,
}

impl Source {
    fn line(&mut self, text: String) {
        self.body.extend(text.lines().map(str::to_string));
    }

    fn finish(self) -> String {
        let mut out = String::new();
        for l in self.head.iter().chain(&self.imports).chain(&self.body) {
            out.push_str(l);
            out.push('\n');
        }
        out
    }

    /// Index of the next body line; head and imports come before it.
    fn body_line(&self) -> usize {
        self.body.len()
    }
}

struct PendingDiagnostic {
    severity: Severity,
    file: String,
    /// Body index until the module is finished, then the 1-based line.
    line: usize,
    module: (usize, usize),
    name: String,
}

struct Generator {
    rng: ChaCha8Rng,
    cfg: SynthConfig,
    deps: Vec<Vec<usize>>,
    types: Vec<TypeRef>,
    next_type: usize,
    ledger: Ledger,
    edges: BTreeSet<(RelationId, String, String)>,
    diagnostics: Vec<PendingDiagnostic>,
}

const NOUNS: [&str; 12] =
    ["Item", "Record", "Widget", "Frame", "Buffer", "Entry", "Handle", "Session", "Token", "Chunk", "Signal", "Slot"];

impl Generator {
    fn count(&mut self, kind: EntityKind) {
        *self.ledger.entities.entry(kind).or_default() += 1;
    }

    fn edge(&mut self, r: RelationId, from: String, to: String) {
        self.edges.insert((r, from, to));
    }

    /// How `target` is written from inside module `m` of project `p`.
    fn path_to(&mut self, src: &mut Source, p: usize, m: usize, target: &TypeRef) -> String {
        let name = target.name.clone();
        if target.project == p && target.module == m {
            return name;
        }
        let prefix = if target.project == p {
            match self.rng.gen_range(0..2) {
                0 => format!("crate::m{}", target.module),
                _ => format!("super::m{}", target.module),
            }
        } else {
            format!("p{}::m{}", target.project, target.module)
        };
        match self.rng.gen_range(0..4) {
            0 => {
                src.imports.insert(format!("use {prefix}::{name};"));
                name
            }
            1 if target.project == p => {
                src.imports.insert(format!("use {prefix}::*;"));
                name
            }
            _ => format!("{prefix}::{name}"),
        }
    }

    /// A data type visible from project `p`, other than `exclude`.
    fn pick(&mut self, p: usize, exclude: &str, traits: bool) -> Option<TypeRef> {
        let deps = &self.deps[p];
        let candidates: Vec<&TypeRef> = self
            .types
            .iter()
            .filter(|t| (t.project == p || deps.contains(&t.project)) && t.name != exclude)
            .filter(|t| (t.shape == Shape::Trait) == traits)
            .collect();
        candidates.choose(&mut self.rng).map(|t| (*t).clone())
    }

    fn key(t: &TypeRef) -> String {
        format!("p{}::m{}::{}", t.project, t.module, t.name)
    }

    fn module(&mut self, p: usize, m: usize, budget: &mut usize) -> String {
        let mut src = Source::default();
        src.head.push(format!("//! Module {m} of project {p}."));
        let file = format!("crates/p{p}/src/m{m}.rs");
        self.count(EntityKind::Namespace);
        self.ledger.documented += 1;
        let types = self.rng.gen_range(1..=6);
        for _ in 0..types {
            if *budget == 0 {
                break;
            }
            *budget -= 1;
            let members = self.rng.gen_range(0..=(*budget).min(8));
            *budget -= members;
            self.type_def(&mut src, p, m, members, &file);
        }
        let head = src.head.len() + src.imports.len();
        for d in self.diagnostics.iter_mut().filter(|d| d.module == (p, m)) {
            d.line += head + 1;
        }
        src.finish()
    }

    fn type_def(&mut self, src: &mut Source, p: usize, m: usize, members: usize, file: &str) {
        let shape = match self.rng.gen_range(0..20) {
            0..=9 => Shape::Class,
            10..=12 => Shape::Copy,
            13..=15 => Shape::Enum,
            _ => Shape::Trait,
        };
        let name = format!("{}{}", NOUNS[self.next_type % NOUNS.len()], self.next_type);
        self.next_type += 1;
        let me = TypeRef { project: p, module: m, name: name.clone(), shape };
        let key = Self::key(&me);
        self.count(EntityKind::Type);
        let tk = match shape {
            Shape::Class => TypeKind::Class,
            Shape::Copy => TypeKind::Struct,
            Shape::Enum => TypeKind::Enum,
            Shape::Trait => TypeKind::Interface,
        };
        *self.ledger.type_kinds.entry(tk).or_default() += 1;

        if self.rng.gen_bool(0.5) {
            src.line(format!("/// {name} holds synthetic data."));
            self.ledger.documented += 1;
        }
        if shape == Shape::Copy {
            src.line("#[derive(Clone, Copy)]".into());
        }
        let decl_line = src.body_line();
        match shape {
            Shape::Class => {
                let fields = self.rng.gen_range(0..=members);
                src.line(format!("pub struct {name} {{"));
                for f in 0..fields {
                    self.count(EntityKind::Field);
                    let ty = match self.pick(p, &name, false).filter(|_| self.rng.gen_bool(0.4)) {
                        Some(t) => {
                            self.edge(RelationId::TypeOf, format!("{key}::f{f}"), Self::key(&t));
                            format!("Vec<{}>", self.path_to(src, p, m, &t))
                        }
                        None => "u32".to_string(),
                    };
                    src.line(format!("    pub f{f}: {ty},"));
                }
                src.line("}".into());
                if fields < members {
                    src.line(format!("impl {name} {{"));
                    let mut has_new = false;
                    for k in fields..members {
                        self.count(EntityKind::Method);
                        let roll = self.rng.gen_range(0..20);
                        if roll < 3 && !has_new {
                            has_new = true;
                            src.line("    pub fn new() -> Self {\n        todo!()\n    }".into());
                        } else if roll < 7 {
                            src.line(format!("    pub fn op{k}(x: u32) -> u32 {{\n        x + {k}\n    }}"));
                        } else {
                            let ret = match self.pick(p, &name, false).filter(|_| self.rng.gen_bool(0.5)) {
                                Some(t) => {
                                    self.edge(RelationId::Returns, format!("{key}::op{k}"), Self::key(&t));
                                    format!("Option<{}>", self.path_to(src, p, m, &t))
                                }
                                None => "u32".to_string(),
                            };
                            let body = if ret == "u32" { k.to_string() } else { "None".to_string() };
                            src.line(format!("    pub fn op{k}(&self) -> {ret} {{\n        {body}\n    }}"));
                        }
                    }
                    src.line("}".into());
                }
                if let Some(t) = self.pick(p, &name, true).filter(|_| self.rng.gen_bool(0.3)) {
                    self.edge(RelationId::InheritsFrom, key.clone(), Self::key(&t));
                    let path = self.path_to(src, p, m, &t);
                    src.line(format!("impl {path} for {name} {{}}"));
                }
            }
            Shape::Copy => {
                src.line(format!("pub struct {name} {{"));
                for f in 0..members {
                    self.count(EntityKind::Field);
                    src.line(format!("    pub f{f}: u32,"));
                }
                src.line("}".into());
            }
            Shape::Enum => {
                src.line(format!("pub enum {name} {{"));
                for v in 0..members {
                    self.count(EntityKind::Field);
                    src.line(format!("    V{v},"));
                }
                src.line("}".into());
            }
            Shape::Trait => {
                let sup = match self.pick(p, &name, true).filter(|_| self.rng.gen_bool(0.3)) {
                    Some(t) => {
                        self.edge(RelationId::InheritsFrom, key.clone(), Self::key(&t));
                        format!(": {}", self.path_to(src, p, m, &t))
                    }
                    None => String::new(),
                };
                src.line(format!("pub trait {name}{sup} {{"));
                for k in 0..members {
                    self.count(EntityKind::Method);
                    src.line(format!("    fn op{k}(&self) -> u32 {{\n        {k}\n    }}"));
                }
                src.line("}".into());
            }
        }
        for (severity, rate) in [(Severity::Error, self.cfg.error_rate), (Severity::Warning, self.cfg.warning_rate)] {
            if self.rng.gen_bool(rate) {
                *self.ledger.diagnostics.entry(severity).or_default() += 1;
                self.diagnostics.push(PendingDiagnostic {
                    severity,
                    file: file.to_string(),
                    line: decl_line,
                    module: (p, m),
                    name: name.clone(),
                });
            }
        }
        self.types.push(me);
    }
}

/// Generates the fixture described by `cfg`. Identical configs give
/// identical fixtures.
pub fn synth(cfg: &SynthConfig) -> Result<Fixture, CliError> {
    cfg.check()?;
    let mut g = Generator {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        cfg: cfg.clone(),
        deps: Vec::new(),
        types: Vec::new(),
        next_type: 0,
        ledger: Ledger { seed: cfg.seed, projects: cfg.projects, nodes: cfg.target_nodes, ..Ledger::default() },
        edges: BTreeSet::new(),
        diagnostics: Vec::new(),
    };
    g.count(EntityKind::Solution);
    let mut budget = cfg.target_nodes - 1 - cfg.projects;
    let external = budget > cfg.projects;
    if external {
        budget -= 1;
        g.count(EntityKind::Package);
    }
    for p in 0..cfg.projects {
        g.count(EntityKind::Project);
        let deps: Vec<usize> = (0..p).filter(|_| g.rng.gen_bool(0.4)).collect();
        for d in &deps {
            g.edge(RelationId::DependsOn, format!("p{p}"), format!("p{d}"));
        }
        if external && (p == 0 || g.rng.gen_bool(0.5)) {
            g.edge(RelationId::DependsOn, format!("p{p}"), EXTERNAL_PACKAGE.into());
        }
        g.deps.push(deps);
    }

    let mut modules: Vec<Vec<String>> = vec![Vec::new(); cfg.projects];
    let mut p = 0;
    while budget > 0 {
        budget -= 1;
        let m = modules[p].len();
        let text = g.module(p, m, &mut budget);
        modules[p].push(text);
        p = (p + 1) % cfg.projects;
    }

    let mut files: Vec<(PathBuf, String)> = Vec::new();
    files.push(("Cargo.toml".into(), "[workspace]\nmembers = [\"crates/*\"]\nresolver = \"2\"\n".into()));
    for (p, mods) in modules.iter().enumerate() {
        let mut manifest = format!("[package]\nname = \"p{p}\"\nversion = \"0.1.0\"\nedition = \"2021\"\n\n[dependencies]\n");
        for d in &g.deps[p] {
            let _ = writeln!(manifest, "p{d} = {{ path = \"../p{d}\" }}");
        }
        if g.edges.contains(&(RelationId::DependsOn, format!("p{p}"), EXTERNAL_PACKAGE.to_string())) {
            let _ = writeln!(manifest, "{EXTERNAL_PACKAGE} = \"1\"");
        }
        files.push((format!("crates/p{p}/Cargo.toml").into(), manifest));
        let lib: String = (0..mods.len()).map(|m| format!("pub mod m{m};\n")).collect();
        files.push((format!("crates/p{p}/src/lib.rs").into(), lib));
        for (m, text) in mods.iter().enumerate() {
            files.push((format!("crates/p{p}/src/m{m}.rs").into(), text.clone()));
        }
    }

    let mut report = String::new();
    for d in &g.diagnostics {
        let (severity, code) = match d.severity {
            Severity::Error => ("error", "E0308"),
            Severity::Warning => ("warning", "W0001"),
            Severity::Hint => ("hint", "H0001"),
        };
        let record = serde_json::json!({
            "severity": severity,
            "code": code,
            "message": format!("synthetic {severity} in {}", d.name),
            "file": d.file,
            "line": d.line,
            "column": 1,
        });
        report.push_str(&record.to_string());
        report.push('\n');
    }

    for (r, _, _) in &g.edges {
        *g.ledger.relations.entry(*r).or_default() += 1;
    }
    g.ledger.relations.insert(RelationId::Declares, cfg.target_nodes - 1);
    g.ledger.relations.retain(|_, n| *n > 0);
    files.push((DIAGNOSTICS_FILE.into(), report));
    let mut ledger_text = serde_json::to_string_pretty(&g.ledger).expect("ledgers serialize");
    ledger_text.push('\n');
    files.push((LEDGER_FILE.into(), ledger_text));
    Ok(Fixture { files, ledger: g.ledger })
}
