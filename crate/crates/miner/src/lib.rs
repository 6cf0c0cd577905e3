//! Static miner for Rust workspaces.
//!
//! Reads Cargo manifests and source files and produces an [`EntityGraph`]:
//! the workspace is the Solution, each package a Project, each module a
//! Namespace, and declarations map to types and members per
//! [`mapping::map_construct`]. Parsing runs in parallel; the result does not
//! depend on the thread count.

pub mod diagnostics;
pub mod docs;
pub mod mapping;
mod resolve;
pub mod syntax;
pub mod workspace;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use codecarta_core::token::{assign_tokens, ForestNode, SiblingKey};
use codecarta_core::{
    Accessibility, Diagnostic, DocComment, Entity, EntityGraph, EntityKind, MethodKind, RelationId, Scalar, Severity,
    SourceLocation, TypeKind,
};
use globset::GlobSet;
use rayon::prelude::*;
use thiserror::Error;
use walkdir::WalkDir;

pub use diagnostics::{ingest_diagnostics, DiagnosticsError};
pub use docs::extract_doc_comment;
pub use mapping::{map_construct, Construct, Mapping};

use resolve::{CrateIndex, CrateRef, ModuleIndex, Resolver, Target};
use syntax::{parse_module, Decl, ModuleSyntax, SpanInfo};
use workspace::{glob_set, relative, PackageInfo, Workspace};

#[derive(Debug, Clone)]
pub struct MinerConfig {
    pub root: PathBuf,
    /// Source files must match one of these; empty means every `.rs` file.
    pub include: Vec<String>,
    pub exclude: Vec<String>,
    pub diagnostics: Option<PathBuf>,
    pub threads: usize,
    /// Mine path dependencies outside the workspace as projects.
    pub follow_external_packages: bool,
}

impl MinerConfig {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        MinerConfig {
            root: root.into(),
            include: Vec::new(),
            exclude: Vec::new(),
            diagnostics: None,
            threads: std::thread::available_parallelism().map_or(1, usize::from),
            follow_external_packages: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum MineError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },
    #[error("bad glob: {0}")]
    Glob(String),
    #[error("no manifest and no source files under {0}")]
    EmptyWorkspace(PathBuf),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("diagnostics report: {0}")]
    Diagnostics(#[from] DiagnosticsError),
    #[error("mined graph failed validation: {0}")]
    Invalid(String),
}

impl MineError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        MineError::Io { path: path.to_path_buf(), source }
    }
}

pub const PARSE_ERROR_CODE: &str = "parse-error";
pub const MISSING_MODULE_CODE: &str = "missing-module";

struct Filter {
    include: Option<GlobSet>,
    exclude: GlobSet,
    root: PathBuf,
}

impl Filter {
    fn admits(&self, file: &Path) -> bool {
        let rel = relative(&self.root, file);
        self.include.as_ref().is_none_or(|g| g.is_match(&rel)) && !self.exclude.is_match(&rel)
    }
}

/// A module body to load: which file, at which module path.
struct Pending {
    project: usize,
    path: Vec<String>,
    candidates: Vec<(PathBuf, bool)>,
    follow: bool,
    /// The `mod` declaration that asked for this file, if any.
    origin: Option<(PathBuf, SpanInfo, Accessibility, Option<DocComment>)>,
}

struct Loaded {
    project: usize,
    module: ModuleSyntax,
    origin: Option<(PathBuf, SpanInfo, Accessibility, Option<DocComment>)>,
    /// Set when the file could not be found or read.
    missing: Option<String>,
}

fn load(p: &Pending, filter: &Filter) -> Option<Loaded> {
    let found = p.candidates.iter().find(|(c, _)| c.is_file());
    let Some((file, mod_rs)) = found else {
        let (parent_file, span, _, _) = p.origin.clone()?;
        let tried: Vec<String> = p.candidates.iter().map(|(c, _)| relative(&filter.root, c)).collect();
        let module = ModuleSyntax { path: p.path.clone(), file: parent_file, span, ..ModuleSyntax::default() };
        return Some(Loaded {
            project: p.project,
            module,
            origin: p.origin.clone(),
            missing: Some(format!("no file for module `{}` (tried {})", p.path.join("::"), tried.join(", "))),
        });
    };
    if !filter.admits(file) {
        return None;
    }
    let mut module = match fs::read_to_string(file) {
        Ok(src) => parse_module(file, &src, p.path.clone(), *mod_rs),
        Err(e) => {
            let mut m = ModuleSyntax { path: p.path.clone(), file: file.clone(), ..ModuleSyntax::default() };
            m.error = Some((format!("cannot read file: {e}"), (1, 1)));
            m
        }
    };
    if !p.follow {
        module.external.clear();
    }
    Some(Loaded { project: p.project, module, origin: p.origin.clone(), missing: None })
}

fn flatten(m: ModuleSyntax, out: &mut Vec<ModuleSyntax>) {
    let mut m = m;
    let inline = std::mem::take(&mut m.inline);
    out.push(m);
    for child in inline {
        flatten(child, out);
    }
}

/// Loads every module of every package, level by level; files within a
/// level parse in parallel and come back in a fixed order.
fn load_modules(ws: &Workspace, filter: &Filter) -> Vec<Loaded> {
    let mut frontier: Vec<Pending> = Vec::new();
    for (i, pkg) in ws.packages.iter().enumerate() {
        for (file, path) in &pkg.roots {
            frontier.push(Pending {
                project: i,
                path: path.clone(),
                candidates: vec![(file.clone(), true)],
                follow: true,
                origin: None,
            });
        }
    }
    if ws.packages.len() == 1 && ws.packages[0].manifest.as_os_str().is_empty() {
        frontier = loose_files(&ws.root, filter);
    }
    let mut out = Vec::new();
    let mut seen: BTreeSet<(usize, Vec<String>)> = BTreeSet::new();
    while !frontier.is_empty() {
        frontier.retain(|p| seen.insert((p.project, p.path.clone())));
        let loaded: Vec<Option<Loaded>> = frontier.par_iter().map(|p| load(p, filter)).collect();
        let mut next = Vec::new();
        for l in loaded.into_iter().flatten() {
            for ext in &l.module.external {
                let mut path = l.module.path.clone();
                path.push(ext.name.clone());
                next.push(Pending {
                    project: l.project,
                    path,
                    candidates: ext.candidates.iter().cloned().zip(ext.is_mod_rs.iter().copied()).collect(),
                    follow: true,
                    origin: Some((l.module.file.clone(), ext.span, ext.access, ext.doc.clone())),
                });
            }
            // inline submodules may declare file modules too
            for inline in all_inline(&l.module) {
                for ext in &inline.external {
                    let mut path = inline.path.clone();
                    path.push(ext.name.clone());
                    next.push(Pending {
                        project: l.project,
                        path,
                        candidates: ext.candidates.iter().cloned().zip(ext.is_mod_rs.iter().copied()).collect(),
                        follow: true,
                        origin: Some((inline.file.clone(), ext.span, ext.access, ext.doc.clone())),
                    });
                }
            }
            out.push(l);
        }
        frontier = next;
    }
    out
}

fn all_inline(m: &ModuleSyntax) -> Vec<&ModuleSyntax> {
    let mut out = Vec::new();
    let mut stack: Vec<&ModuleSyntax> = m.inline.iter().collect();
    while let Some(x) = stack.pop() {
        out.push(x);
        stack.extend(x.inline.iter());
    }
    out.sort_by(|a, b| a.path.cmp(&b.path));
    out
}

/// Without a manifest every source file is its own module.
fn loose_files(root: &Path, filter: &Filter) -> Vec<Pending> {
    let mut files: Vec<PathBuf> = WalkDir::new(root)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| !(e.depth() > 0 && e.file_type().is_dir() && (e.file_name() == "target" || e.file_name().to_string_lossy().starts_with('.'))))
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file() && e.path().extension().is_some_and(|x| x == "rs"))
        .map(|e| e.into_path())
        .filter(|p| filter.admits(p))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|f| {
            let rel = relative(root, &f);
            let mut parts: Vec<String> = rel.trim_end_matches(".rs").split('/').map(str::to_string).collect();
            if parts.first().map(String::as_str) == Some("src") {
                parts.remove(0);
            }
            if matches!(parts.last().map(String::as_str), Some("mod" | "lib" | "main")) {
                parts.pop();
            }
            Pending { project: 0, path: parts, candidates: vec![(f, true)], follow: false, origin: None }
        })
        .collect()
}

/// An entity before tokens exist.
struct Proto {
    parent: Option<usize>,
    kind: EntityKind,
    name: String,
    disambiguator: String,
    type_kind: Option<TypeKind>,
    method_kind: Option<MethodKind>,
    access: Option<Accessibility>,
    is_static: bool,
    doc: Option<DocComment>,
    diagnostics: Vec<Diagnostic>,
    extra: BTreeMap<String, Scalar>,
}

impl Proto {
    fn new(parent: Option<usize>, kind: EntityKind, name: impl Into<String>) -> Self {
        Proto {
            parent,
            kind,
            name: name.into(),
            disambiguator: String::new(),
            type_kind: None,
            method_kind: None,
            access: None,
            is_static: false,
            doc: None,
            diagnostics: Vec::new(),
            extra: BTreeMap::new(),
        }
    }

    fn from_mapping(parent: usize, construct: Construct, name: impl Into<String>) -> Self {
        let m = map_construct(construct);
        let mut p = Proto::new(Some(parent), m.kind, name);
        p.type_kind = m.type_kind;
        p.method_kind = m.method_kind;
        p.is_static = m.is_static;
        if let Some(label) = m.unmapped {
            p.extra.insert("unmappedConstruct".into(), label.into());
        }
        p
    }

    fn set_span(&mut self, file: &str, span: SpanInfo) {
        self.extra.insert("file".into(), file.into());
        self.extra.insert("startLine".into(), Scalar::Int(span.start.0.into()));
        self.extra.insert("startColumn".into(), Scalar::Int(span.start.1.into()));
        self.extra.insert("endLine".into(), Scalar::Int(span.end.0.into()));
        self.extra.insert("endColumn".into(), Scalar::Int(span.end.1.into()));
    }
}

fn error_at(code: &str, message: String, file: &str, at: (u32, u32)) -> Diagnostic {
    Diagnostic {
        severity: Severity::Error,
        code: code.into(),
        message,
        location: Some(SourceLocation { file: file.into(), line: at.0, column: at.1 }),
    }
}

struct Builder<'a> {
    root: &'a Path,
    protos: Vec<Proto>,
    edges: BTreeSet<(RelationId, usize, usize)>,
    solution: usize,
    packages: BTreeMap<String, usize>,
    stubs: BTreeMap<String, usize>,
}

impl Builder<'_> {
    fn push(&mut self, p: Proto) -> usize {
        self.protos.push(p);
        self.protos.len() - 1
    }

    fn package(&mut self, name: &str) -> usize {
        if let Some(&i) = self.packages.get(name) {
            return i;
        }
        let p = Proto::new(Some(self.solution), EntityKind::Package, name);
        let i = self.push(p);
        self.packages.insert(name.to_string(), i);
        i
    }

    fn stub(&mut self, name: &str) -> usize {
        if let Some(&i) = self.stubs.get(name) {
            return i;
        }
        let mut p = Proto::new(Some(self.solution), EntityKind::Package, name);
        p.disambiguator = "stub".into();
        p.extra.insert("stub".into(), Scalar::Bool(true));
        let i = self.push(p);
        self.stubs.insert(name.to_string(), i);
        i
    }

    fn rel(&self, file: &Path) -> String {
        relative(self.root, file)
    }

    /// Adds a declaration and its members under `parent`; records type
    /// references for later resolution.
    fn add_decl(&mut self, parent: usize, d: &Decl, file: &str, refs: &mut Vec<PendingRef>, ctx: (usize, &[String])) -> usize {
        let mut p = Proto::from_mapping(parent, d.construct, d.name.clone());
        p.disambiguator = d.disambiguator.clone();
        p.access = Some(d.access);
        p.doc = d.doc.clone();
        p.set_span(file, d.span);
        let i = self.push(p);
        for (relation, path) in &d.refs {
            refs.push(PendingRef { from: i, relation: *relation, path: path.clone(), krate: ctx.0, module: ctx.1.to_vec(), generics: d.generics.clone() });
        }
        for m in &d.members {
            self.add_decl(i, m, file, refs, ctx);
        }
        i
    }
}

struct PendingRef {
    from: usize,
    relation: RelationId,
    path: Vec<String>,
    krate: usize,
    module: Vec<String>,
    generics: Vec<String>,
}

/// Mines the workspace at `cfg.root` and attaches the optional diagnostics
/// report.
pub fn mine(cfg: &MinerConfig) -> Result<EntityGraph, MineError> {
    if cfg.threads == 0 {
        return Err(MineError::Config("thread count must be at least 1".into()));
    }
    let root = fs::canonicalize(&cfg.root).map_err(|e| MineError::io(&cfg.root, e))?;
    fs::read_dir(&root).map_err(|e| MineError::io(&root, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| MineError::Config(e.to_string()))?;
    let mut g = pool.install(|| mine_in(&root, cfg))?;
    if let Some(report) = &cfg.diagnostics {
        g = ingest_diagnostics(g, report, Some(&root))?;
    }
    Ok(g)
}

fn mine_in(root: &Path, cfg: &MinerConfig) -> Result<EntityGraph, MineError> {
    let filter = Filter {
        include: if cfg.include.is_empty() { None } else { Some(glob_set(&cfg.include)?) },
        exclude: glob_set(&cfg.exclude)?,
        root: root.to_path_buf(),
    };
    let mut ws = workspace::discover(root, &filter.exclude, cfg.follow_external_packages)?;
    if ws.manifest.is_none() {
        let any_source = WalkDir::new(root)
            .into_iter()
            .filter_map(Result::ok)
            .any(|e| e.path().extension().is_some_and(|x| x == "rs") && filter.admits(e.path()));
        if !any_source {
            return Err(MineError::EmptyWorkspace(root.to_path_buf()));
        }
        ws.packages.push(PackageInfo {
            name: ws.name.clone(),
            crate_name: ws.name.replace('-', "_"),
            version: None,
            dir: root.to_path_buf(),
            manifest: PathBuf::new(),
            roots: Vec::new(),
            deps: Vec::new(),
        });
    }
    let loaded = load_modules(&ws, &filter);
    Ok(assemble(root, &ws, loaded))
}

fn assemble(root: &Path, ws: &Workspace, loaded: Vec<Loaded>) -> EntityGraph {
    let mut b = Builder {
        root,
        protos: Vec::new(),
        edges: BTreeSet::new(),
        solution: 0,
        packages: BTreeMap::new(),
        stubs: BTreeMap::new(),
    };
    let mut solution = Proto::new(None, EntityKind::Solution, ws.name.clone());
    if let Some(m) = &ws.manifest {
        solution.extra.insert("file".into(), b.rel(m).into());
    }
    b.solution = b.push(solution);

    // projects and dependencies
    let mut project_ids = Vec::new();
    let mut crates: Vec<CrateIndex> = Vec::new();
    for pkg in &ws.packages {
        let mut p = Proto::new(Some(b.solution), EntityKind::Project, pkg.name.clone());
        p.extra.insert("dir".into(), b.rel(&pkg.dir).into());
        if !pkg.manifest.as_os_str().is_empty() {
            p.extra.insert("file".into(), b.rel(&pkg.manifest).into());
        }
        if let Some(v) = &pkg.version {
            p.extra.insert("version".into(), v.clone().into());
        }
        project_ids.push(b.push(p));
        let mut index = CrateIndex::default();
        for (_, path) in &pkg.roots {
            index.roots.insert(path.clone());
        }
        if pkg.roots.is_empty() {
            index.roots.insert(Vec::new());
        }
        crates.push(index);
    }
    let by_dir: BTreeMap<&Path, usize> = ws.packages.iter().enumerate().map(|(i, p)| (p.dir.as_path(), i)).collect();
    for (i, pkg) in ws.packages.iter().enumerate() {
        if pkg.roots.iter().any(|(_, path)| !path.is_empty()) {
            crates[i].crates.insert(pkg.crate_name.clone(), CrateRef::Project(i));
        }
        for dep in &pkg.deps {
            let alias = dep.alias.replace('-', "_");
            let target = dep.path.as_deref().and_then(|p| by_dir.get(p)).copied();
            match target {
                Some(j) if j != i => {
                    b.edges.insert((RelationId::DependsOn, project_ids[i], project_ids[j]));
                    crates[i].crates.insert(alias, CrateRef::Project(j));
                }
                Some(_) => {}
                None => {
                    let k = b.package(&dep.package);
                    b.edges.insert((RelationId::DependsOn, project_ids[i], k));
                    crates[i].crates.insert(alias, CrateRef::External(dep.package.clone()));
                }
            }
        }
    }

    // modules, declarations
    let mut modules: Vec<(usize, ModuleSyntax, Option<(PathBuf, SpanInfo, Accessibility, Option<DocComment>)>, Option<String>)> =
        Vec::new();
    for l in loaded {
        let mut flat = Vec::new();
        flatten(l.module, &mut flat);
        let mut first = true;
        for m in flat {
            let origin = if first { l.origin.clone() } else { None };
            let missing = if first { l.missing.clone() } else { None };
            first = false;
            modules.push((l.project, m, origin, missing));
        }
    }
    let mut namespaces: BTreeMap<(usize, Vec<String>), usize> = BTreeMap::new();
    let mut refs: Vec<PendingRef> = Vec::new();
    for (project, m, origin, missing) in &modules {
        let pid = project_ids[*project];
        let file = b.rel(&m.file);
        let holder = if m.path.is_empty() && m.error.is_none() && missing.is_none() {
            pid
        } else {
            let name = if m.path.is_empty() { file.clone() } else { m.path.join("::") };
            let mut ns = Proto::new(Some(pid), EntityKind::Namespace, name);
            ns.access = Some(m.access.or(origin.as_ref().map(|o| o.2)).unwrap_or(Accessibility::Public));
            ns.doc = origin.as_ref().and_then(|o| o.3.clone()).or_else(|| m.doc.clone());
            ns.set_span(&file, m.span);
            if let Some(message) = missing {
                ns.extra.insert("placeholder".into(), Scalar::Bool(true));
                ns.diagnostics.push(error_at(MISSING_MODULE_CODE, message.clone(), &file, m.span.start));
            }
            if let Some((message, at)) = &m.error {
                ns.extra.insert("placeholder".into(), Scalar::Bool(true));
                ns.diagnostics.push(error_at(PARSE_ERROR_CODE, message.clone(), &file, *at));
            }
            b.push(ns)
        };
        if m.path.is_empty() && holder == pid && m.doc.is_some() && b.protos[pid].doc.is_none() {
            b.protos[pid].doc = m.doc.clone();
        }
        namespaces.insert((*project, m.path.clone()), holder);
        let mut index = ModuleIndex::default();
        index.add_uses(&m.uses);
        for d in &m.decls {
            let i = b.add_decl(holder, d, &file, &mut refs, (*project, &m.path));
            if b.protos[i].kind == EntityKind::Type {
                index.types.entry(d.name.clone()).or_insert(i);
            }
        }
        crates[*project].modules.insert(m.path.clone(), index);
    }

    // impl blocks attach members to their self type
    let mut foreign: BTreeMap<(usize, String), usize> = BTreeMap::new();
    let mut impl_edges: Vec<(usize, usize, Vec<String>, Vec<String>, Vec<String>)> = Vec::new();
    for (project, m, _, _) in &modules {
        let file = b.rel(&m.file);
        let holder = namespaces[&(*project, m.path.clone())];
        for imp in &m.impls {
            let resolver = Resolver { crates: &crates };
            let owner = match resolver.resolve(*project, &m.path, &imp.self_path, &imp.generics) {
                Target::Local(t) if b.protos[t].kind == EntityKind::Type => t,
                _ => {
                    let name = imp.self_path.last().cloned().unwrap_or_default();
                    *foreign.entry((holder, name.clone())).or_insert_with(|| {
                        let mut p = Proto::from_mapping(holder, Construct::Struct, name);
                        p.extra.insert("unmappedConstruct".into(), "impl of a foreign type".into());
                        p.access = Some(Accessibility::Public);
                        b.protos.push(p);
                        b.protos.len() - 1
                    })
                }
            };
            for d in &imp.members {
                b.add_decl(owner, d, &file, &mut refs, (*project, &m.path));
            }
            if let Some(tp) = &imp.trait_path {
                impl_edges.push((owner, *project, m.path.clone(), tp.clone(), imp.generics.clone()));
            }
        }
    }

    // edges
    let resolve_edge = |b: &mut Builder, from: usize, relation: RelationId, krate: usize, module: &[String], path: &[String], generics: &[String]| {
        let resolver = Resolver { crates: &crates };
        let target = match resolver.resolve(krate, module, path, generics) {
            Target::Local(t) => t,
            Target::External(name) => b.package(&name),
            Target::Unknown(name) => b.stub(&name),
            Target::Ignore => return,
        };
        if target != from {
            b.edges.insert((relation, from, target));
        }
    };
    for r in &refs {
        resolve_edge(&mut b, r.from, r.relation, r.krate, &r.module, &r.path, &r.generics);
    }
    for (owner, krate, module, trait_path, generics) in &impl_edges {
        resolve_edge(&mut b, *owner, RelationId::InheritsFrom, *krate, module, trait_path, generics);
    }

    build_graph(b)
}

/// Makes sibling keys unique, assigns tokens and fills in the graph.
fn build_graph(mut b: Builder) -> EntityGraph {
    let mut seen: BTreeMap<(Option<usize>, u8, String, String), u32> = BTreeMap::new();
    for p in &mut b.protos {
        let key = (p.parent, p.kind.rank(), p.name.clone(), p.disambiguator.clone());
        let count = seen.entry(key).or_insert(0);
        *count += 1;
        if *count > 1 {
            // same key twice (cfg'd duplicates): keep source order
            p.disambiguator = format!("{}#{}", p.disambiguator, count);
        }
    }
    let nodes: Vec<ForestNode> = b
        .protos
        .iter()
        .map(|p| ForestNode { parent: p.parent, key: SiblingKey::new(p.kind, p.name.clone(), p.disambiguator.clone()) })
        .collect();
    let tokens = assign_tokens(&nodes).expect("sibling keys were made unique");
    let mut g = EntityGraph::new();
    for (i, p) in b.protos.into_iter().enumerate() {
        let mut e = Entity::new(tokens[i].clone(), p.kind, p.name);
        e.type_kind = p.type_kind;
        e.method_kind = p.method_kind;
        e.accessibility = p.access;
        e.is_static = p.is_static;
        e.doc_comment = p.doc;
        e.diagnostics = p.diagnostics;
        e.extra = p.extra;
        if !p.disambiguator.is_empty() {
            e.extra.insert(codecarta_core::model::DISAMBIGUATOR_KEY.into(), p.disambiguator.into());
        }
        if let Some(parent) = p.parent {
            g.add_edge(RelationId::Declares, tokens[parent].clone(), tokens[i].clone());
        }
        g.insert(e);
    }
    for (relation, s, t) in b.edges {
        g.add_edge(relation, tokens[s].clone(), tokens[t].clone());
    }
    g.refresh_member_counts();
    g
}
