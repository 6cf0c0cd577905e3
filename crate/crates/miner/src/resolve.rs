//! Best-effort syntactic name resolution for type references.

use std::collections::{BTreeMap, BTreeSet};

use crate::syntax::{PathRef, UseEntry};

/// Names that resolve to the standard library or the language itself and
/// never produce an edge.
const PRELUDE: &[&str] = &[
    "bool", "char", "str", "u8", "u16", "u32", "u64", "u128", "usize", "i8", "i16", "i32", "i64", "i128", "isize",
    "f32", "f64", "String", "Vec", "Option", "Result", "Box", "Rc", "Arc", "Cow", "HashMap", "HashSet", "BTreeMap",
    "BTreeSet", "VecDeque", "BinaryHeap", "Path", "PathBuf", "Fn", "FnMut", "FnOnce", "Send", "Sync", "Sized",
    "Unpin", "Copy", "Clone", "Default", "Debug", "Display", "Iterator", "IntoIterator", "ToString", "ToOwned",
    "PartialEq", "Eq", "PartialOrd", "Ord", "Hash", "From", "Into", "TryFrom", "TryInto", "AsRef", "AsMut", "Drop",
    "Error", "RefCell", "Cell", "Mutex", "RwLock", "PhantomData", "Formatter", "Ordering", "Duration", "Instant",
    "OsString", "OsStr", "Any", "Future", "Pin", "Range",
];

const STD_CRATES: &[&str] = &["std", "core", "alloc", "proc_macro", "test"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    /// A declared type, by entity index.
    Local(usize),
    /// A dependency that is not mined, by package name.
    External(String),
    /// Standard library, generics, primitives.
    Ignore,
    /// Nothing known by this name; becomes a stub.
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CrateRef {
    Project(usize),
    External(String),
}

#[derive(Debug, Default)]
pub struct ModuleIndex {
    pub types: BTreeMap<String, usize>,
    pub uses: BTreeMap<String, PathRef>,
    pub globs: Vec<PathRef>,
}

#[derive(Debug, Default)]
pub struct CrateIndex {
    pub modules: BTreeMap<Vec<String>, ModuleIndex>,
    /// Names usable as the first path segment for other crates.
    pub crates: BTreeMap<String, CrateRef>,
    /// Module path of each crate root (`[]` for the library, `["main"]`, ...).
    pub roots: BTreeSet<Vec<String>>,
}

impl ModuleIndex {
    pub fn add_uses(&mut self, uses: &[UseEntry]) {
        for u in uses {
            match u {
                UseEntry::Alias { alias, path } => {
                    if alias != "_" {
                        self.uses.entry(alias.clone()).or_insert_with(|| path.clone());
                    }
                }
                UseEntry::Glob(path) => self.globs.push(path.clone()),
            }
        }
    }
}

pub struct Resolver<'a> {
    pub crates: &'a [CrateIndex],
}

const MAX_DEPTH: usize = 12;

impl Resolver<'_> {
    fn crate_root<'b>(&self, krate: usize, module: &'b [String]) -> &'b [String] {
        let roots = &self.crates[krate].roots;
        (0..=module.len()).rev().map(|k| &module[..k]).find(|p| roots.contains(*p)).unwrap_or(&module[..0])
    }

    /// Resolves `path` as written inside `module` of crate `krate`.
    pub fn resolve(&self, krate: usize, module: &[String], path: &[String], generics: &[String]) -> Target {
        self.resolve_at(krate, module, path, generics, 0)
    }

    fn resolve_at(&self, krate: usize, module: &[String], path: &[String], generics: &[String], depth: usize) -> Target {
        let Some(first) = path.first() else { return Target::Ignore };
        let last = path.last().unwrap();
        if depth > MAX_DEPTH || first == "Self" {
            return Target::Ignore;
        }
        if path.len() == 1 && generics.contains(first) {
            return Target::Ignore;
        }
        let index = &self.crates[krate];
        let here = index.modules.get(module);
        match first.as_str() {
            "::" => return self.resolve_crate_path(krate, &path[1..], depth),
            "crate" => {
                let mut abs = self.crate_root(krate, module).to_vec();
                abs.extend_from_slice(&path[1..]);
                return self.lookup(krate, &abs, depth);
            }
            "self" => {
                let mut abs = module.to_vec();
                abs.extend_from_slice(&path[1..]);
                return self.lookup(krate, &abs, depth);
            }
            "super" => {
                let mut base = module.to_vec();
                let mut rest = path;
                while rest.first().map(String::as_str) == Some("super") {
                    base.pop();
                    rest = &rest[1..];
                }
                base.extend_from_slice(rest);
                return self.lookup(krate, &base, depth);
            }
            _ => {}
        }
        if path.len() == 1 {
            if let Some(&t) = here.and_then(|m| m.types.get(first)) {
                return Target::Local(t);
            }
        }
        if let Some(alias) = here.and_then(|m| m.uses.get(first)) {
            if alias.as_slice() != path {
                let mut full = alias.clone();
                full.extend_from_slice(&path[1..]);
                return self.resolve_at(krate, module, &full, generics, depth + 1);
            }
        }
        if path.len() == 1 {
            for glob in here.map(|m| m.globs.as_slice()).unwrap_or_default() {
                let mut full = glob.clone();
                full.push(first.clone());
                if let Target::Local(t) = self.resolve_at(krate, module, &full, generics, depth + 1) {
                    return Target::Local(t);
                }
            }
            if PRELUDE.contains(&first.as_str()) {
                return Target::Ignore;
            }
            return Target::Unknown(first.clone());
        }
        if let Some(&t) = here.and_then(|m| m.types.get(first)) {
            // Type::Assoc, Enum::Variant
            return Target::Local(t);
        }
        let mut child = module.to_vec();
        child.push(first.clone());
        if index.modules.contains_key(&child) {
            child.extend_from_slice(&path[1..]);
            return self.lookup(krate, &child, depth);
        }
        if index.crates.contains_key(first) || STD_CRATES.contains(&first.as_str()) {
            return self.resolve_crate_path(krate, path, depth);
        }
        Target::Unknown(last.clone())
    }

    /// `path[0]` names a crate.
    fn resolve_crate_path(&self, krate: usize, path: &[String], depth: usize) -> Target {
        let Some(first) = path.first() else { return Target::Ignore };
        if STD_CRATES.contains(&first.as_str()) {
            return Target::Ignore;
        }
        match self.crates[krate].crates.get(first) {
            Some(CrateRef::Project(p)) => self.lookup(*p, &path[1..], depth),
            Some(CrateRef::External(name)) => Target::External(name.clone()),
            None => Target::Unknown(path.last().unwrap().clone()),
        }
    }

    /// `abs` is a module path followed by a type name, relative to the crate.
    fn lookup(&self, krate: usize, abs: &[String], depth: usize) -> Target {
        let Some((name, module)) = abs.split_last() else { return Target::Ignore };
        let Some(m) = self.crates[krate].modules.get(module) else {
            // Enum::Variant and Type::Assoc resolve to their owner
            if let Some((owner, rest)) = module.split_last() {
                if let Some(&t) = self.crates[krate].modules.get(rest).and_then(|m| m.types.get(owner)) {
                    return Target::Local(t);
                }
            }
            return Target::Unknown(name.clone());
        };
        if let Some(&t) = m.types.get(name) {
            return Target::Local(t);
        }
        // re-exports
        if m.uses.contains_key(name) || !m.globs.is_empty() {
            return self.resolve_at(krate, module, std::slice::from_ref(name), &[], depth + 1);
        }
        Target::Unknown(name.clone())
    }
}
