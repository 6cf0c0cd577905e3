//! Workspace discovery from Cargo manifests.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use globset::{Glob, GlobSet, GlobSetBuilder};
use walkdir::WalkDir;

use crate::MineError;

/// A crate whose sources are mined.
#[derive(Debug, Clone)]
pub struct PackageInfo {
    pub name: String,
    /// Name used in paths (`foo-bar` becomes `foo_bar`).
    pub crate_name: String,
    pub version: Option<String>,
    pub dir: PathBuf,
    pub manifest: PathBuf,
    /// Root source files and the module path their items live under.
    pub roots: Vec<(PathBuf, Vec<String>)>,
    pub deps: Vec<Dependency>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dependency {
    /// Name the dependency is referred to by in code.
    pub alias: String,
    /// Package name on the registry or in its own manifest.
    pub package: String,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct Workspace {
    pub root: PathBuf,
    pub name: String,
    pub manifest: Option<PathBuf>,
    pub packages: Vec<PackageInfo>,
}

fn read_toml(path: &Path) -> Result<toml::Table, MineError> {
    let text = fs::read_to_string(path).map_err(|e| MineError::io(path, e))?;
    text.parse::<toml::Table>()
        .map_err(|e| MineError::Manifest { path: path.to_path_buf(), message: e.message().to_string() })
}

pub(crate) fn glob_set(patterns: &[String]) -> Result<GlobSet, MineError> {
    let mut b = GlobSetBuilder::new();
    for p in patterns {
        b.add(Glob::new(p).map_err(|e| MineError::Glob(e.to_string()))?);
    }
    b.build().map_err(|e| MineError::Glob(e.to_string()))
}

pub(crate) fn relative(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("/")
}

fn skip_dir(entry: &walkdir::DirEntry) -> bool {
    let name = entry.file_name().to_string_lossy();
    entry.depth() > 0 && entry.file_type().is_dir() && (name == "target" || name.starts_with('.'))
}

fn manifest_dirs(root: &Path) -> Vec<PathBuf> {
    let mut dirs: Vec<PathBuf> = WalkDir::new(root)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| !skip_dir(e))
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file() && e.file_name() == "Cargo.toml")
        .filter_map(|e| e.path().parent().map(Path::to_path_buf))
        .collect();
    dirs.sort();
    dirs
}

fn deps_of(table: &toml::Table, dir: &Path, inherited: &BTreeMap<String, Dependency>) -> Vec<Dependency> {
    let mut sections: Vec<&toml::Table> = Vec::new();
    if let Some(d) = table.get("dependencies").and_then(|v| v.as_table()) {
        sections.push(d);
    }
    if let Some(targets) = table.get("target").and_then(|v| v.as_table()) {
        for t in targets.values() {
            if let Some(d) = t.get("dependencies").and_then(|v| v.as_table()) {
                sections.push(d);
            }
        }
    }
    let mut out: BTreeMap<String, Dependency> = BTreeMap::new();
    for section in sections {
        for (alias, spec) in section {
            let dep = match spec {
                toml::Value::Table(t) if t.get("workspace").and_then(|v| v.as_bool()) == Some(true) => {
                    match inherited.get(alias) {
                        Some(d) => Dependency { alias: alias.clone(), ..d.clone() },
                        None => Dependency { alias: alias.clone(), package: alias.clone(), path: None },
                    }
                }
                toml::Value::Table(t) => Dependency {
                    alias: alias.clone(),
                    package: t.get("package").and_then(|v| v.as_str()).unwrap_or(alias).to_string(),
                    path: t.get("path").and_then(|v| v.as_str()).map(|p| normalize(&dir.join(p))),
                },
                _ => Dependency { alias: alias.clone(), package: alias.clone(), path: None },
            };
            out.insert(alias.clone(), dep);
        }
    }
    out.into_values().collect()
}

/// Lexical normalization; keeps paths comparable without touching the disk.
fn normalize(path: &Path) -> PathBuf {
    let mut out = PathBuf::new();
    for c in path.components() {
        match c {
            std::path::Component::ParentDir => {
                out.pop();
            }
            std::path::Component::CurDir => {}
            other => out.push(other.as_os_str()),
        }
    }
    out
}

fn load_package(dir: &Path, inherited: &BTreeMap<String, Dependency>) -> Result<Option<PackageInfo>, MineError> {
    let manifest = dir.join("Cargo.toml");
    let table = read_toml(&manifest)?;
    let Some(package) = table.get("package").and_then(|v| v.as_table()) else {
        return Ok(None);
    };
    let name = package
        .get("name")
        .and_then(|v| v.as_str())
        .ok_or_else(|| MineError::Manifest { path: manifest.clone(), message: "package has no name".into() })?
        .to_string();
    let version = package.get("version").and_then(|v| v.as_str()).map(str::to_string);
    let lib = table.get("lib").and_then(|v| v.as_table());
    let crate_name = lib
        .and_then(|l| l.get("name"))
        .and_then(|v| v.as_str())
        .map(str::to_string)
        .unwrap_or_else(|| name.replace('-', "_"));
    let lib_path = lib.and_then(|l| l.get("path")).and_then(|v| v.as_str()).map(|p| dir.join(p));

    let mut roots = Vec::new();
    let lib_root = lib_path.unwrap_or_else(|| dir.join("src/lib.rs"));
    let has_lib = lib_root.is_file();
    if has_lib {
        roots.push((lib_root, Vec::new()));
    }
    let main = dir.join("src/main.rs");
    if main.is_file() {
        let prefix = if has_lib { vec!["main".to_string()] } else { Vec::new() };
        roots.push((main, prefix));
    }
    if let Ok(entries) = fs::read_dir(dir.join("src/bin")) {
        let mut bins: Vec<PathBuf> = entries
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|x| x == "rs"))
            .collect();
        bins.sort();
        for b in bins {
            let stem = b.file_stem().unwrap().to_string_lossy().into_owned();
            roots.push((b, vec!["bin".to_string(), stem]));
        }
    }
    Ok(Some(PackageInfo {
        name,
        crate_name,
        version,
        dir: dir.to_path_buf(),
        manifest,
        roots,
        deps: deps_of(&table, dir, inherited),
    }))
}

/// Finds the packages under `root`. With `follow_external`, path
/// dependencies that are not workspace members are loaded as packages too.
/// Packages whose manifest matches `exclude` are skipped.
pub fn discover(root: &Path, exclude: &GlobSet, follow_external: bool) -> Result<Workspace, MineError> {
    let name = root
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "workspace".to_string());
    let root_manifest = root.join("Cargo.toml");
    let excluded = |dir: &Path| exclude.is_match(relative(root, &dir.join("Cargo.toml")));

    let mut member_dirs: Vec<PathBuf> = Vec::new();
    let mut inherited: BTreeMap<String, Dependency> = BTreeMap::new();
    let mut manifest = None;
    if root_manifest.is_file() {
        manifest = Some(root_manifest.clone());
        let table = read_toml(&root_manifest)?;
        if table.contains_key("package") {
            member_dirs.push(root.to_path_buf());
        }
        if let Some(ws) = table.get("workspace").and_then(|v| v.as_table()) {
            let list = |key: &str| -> Vec<String> {
                ws.get(key)
                    .and_then(|v| v.as_array())
                    .map(|a| a.iter().filter_map(|s| s.as_str()).map(|s| s.trim_end_matches('/').to_string()).collect())
                    .unwrap_or_default()
            };
            let members = glob_set(&list("members"))?;
            let skipped = glob_set(&list("exclude"))?;
            for dir in manifest_dirs(root) {
                let rel = relative(root, &dir);
                if dir != root && members.is_match(&rel) && !skipped.is_match(&rel) {
                    member_dirs.push(dir);
                }
            }
            if let Some(deps) = ws.get("dependencies").and_then(|v| v.as_table()) {
                let mut fake = toml::Table::new();
                fake.insert("dependencies".into(), toml::Value::Table(deps.clone()));
                for d in deps_of(&fake, root, &BTreeMap::new()) {
                    inherited.insert(d.alias.clone(), d);
                }
            }
        }
    }

    let mut packages = Vec::new();
    let mut seen: BTreeSet<PathBuf> = BTreeSet::new();
    let mut queue: Vec<PathBuf> = member_dirs;
    let mut index = 0;
    while index < queue.len() {
        let dir = normalize(&queue[index]);
        index += 1;
        if !seen.insert(dir.clone()) || excluded(&dir) {
            continue;
        }
        let Some(pkg) = load_package(&dir, &inherited)? else { continue };
        if follow_external {
            for d in &pkg.deps {
                if let Some(p) = &d.path {
                    if p.join("Cargo.toml").is_file() {
                        queue.push(p.clone());
                    }
                }
            }
        }
        packages.push(pkg);
    }
    packages.sort_by(|a, b| a.dir.cmp(&b.dir));
    Ok(Workspace { root: root.to_path_buf(), name, manifest, packages })
}
