//! Per-file extraction: one parsed file becomes a tree of module records.

use std::path::{Path, PathBuf};

use codecarta_core::{Accessibility, DocComment, RelationId};
use proc_macro2::Span;
use quote::ToTokens;
use syn::spanned::Spanned;
use syn::{FnArg, GenericParam, Generics, ImplItem, Item, ReturnType, TraitItem, Type, TypeParamBound, UseTree};

use crate::docs::{extract_doc_comment, extract_inner_doc};
use crate::mapping::{accessibility, Construct, OPERATOR_TRAITS};

/// Start and end as (line, 1-based column).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct SpanInfo {
    pub start: (u32, u32),
    pub end: (u32, u32),
}

impl SpanInfo {
    pub fn of(span: Span) -> Self {
        let (s, e) = (span.start(), span.end());
        SpanInfo { start: (s.line as u32, s.column as u32 + 1), end: (e.line as u32, e.column as u32 + 1) }
    }

    pub fn union(self, other: SpanInfo) -> SpanInfo {
        SpanInfo { start: self.start.min(other.start), end: self.end.max(other.end) }
    }
}

/// A path as written, split into segments.
pub type PathRef = Vec<String>;

#[derive(Debug, Clone)]
pub struct Decl {
    pub construct: Construct,
    pub name: String,
    pub disambiguator: String,
    pub access: Accessibility,
    pub doc: Option<DocComment>,
    pub span: SpanInfo,
    pub members: Vec<Decl>,
    pub refs: Vec<(RelationId, PathRef)>,
    /// Generic parameter names visible in `refs`.
    pub generics: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ImplBlock {
    pub self_path: PathRef,
    pub trait_path: Option<PathRef>,
    pub generics: Vec<String>,
    pub members: Vec<Decl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UseEntry {
    Alias { alias: String, path: PathRef },
    Glob(PathRef),
}

/// `mod name;` whose body lives in another file.
#[derive(Debug, Clone)]
pub struct ExternalMod {
    pub name: String,
    pub candidates: Vec<PathBuf>,
    pub access: Accessibility,
    pub doc: Option<DocComment>,
    pub span: SpanInfo,
    /// Directory for the module's own `mod` declarations, per candidate.
    pub is_mod_rs: Vec<bool>,
}

#[derive(Debug, Clone, Default)]
pub struct ModuleSyntax {
    pub path: Vec<String>,
    pub file: PathBuf,
    pub span: SpanInfo,
    pub access: Option<Accessibility>,
    pub doc: Option<DocComment>,
    pub decls: Vec<Decl>,
    pub impls: Vec<ImplBlock>,
    pub uses: Vec<UseEntry>,
    pub inline: Vec<ModuleSyntax>,
    pub external: Vec<ExternalMod>,
    /// Parse failure: message and (line, column).
    pub error: Option<(String, (u32, u32))>,
}

fn path_segments(path: &syn::Path) -> PathRef {
    let mut out: PathRef = path.segments.iter().map(|s| s.ident.to_string()).collect();
    if path.leading_colon.is_some() {
        out.insert(0, "::".into());
    }
    out
}

/// Every path mentioned in a type, outermost first.
pub fn type_paths(ty: &Type, out: &mut Vec<PathRef>) {
    match ty {
        Type::Path(p) => {
            if p.qself.is_none() {
                out.push(path_segments(&p.path));
            }
            for seg in &p.path.segments {
                if let syn::PathArguments::AngleBracketed(args) = &seg.arguments {
                    for arg in &args.args {
                        if let syn::GenericArgument::Type(t) = arg {
                            type_paths(t, out);
                        }
                    }
                }
            }
        }
        Type::Reference(r) => type_paths(&r.elem, out),
        Type::Ptr(p) => type_paths(&p.elem, out),
        Type::Slice(s) => type_paths(&s.elem, out),
        Type::Array(a) => type_paths(&a.elem, out),
        Type::Paren(p) => type_paths(&p.elem, out),
        Type::Group(g) => type_paths(&g.elem, out),
        Type::Tuple(t) => t.elems.iter().for_each(|e| type_paths(e, out)),
        Type::TraitObject(t) => bound_paths(&t.bounds, out),
        Type::ImplTrait(t) => bound_paths(&t.bounds, out),
        Type::BareFn(f) => {
            f.inputs.iter().for_each(|a| type_paths(&a.ty, out));
            if let ReturnType::Type(_, t) = &f.output {
                type_paths(t, out);
            }
        }
        _ => {}
    }
}

fn bound_paths<'a>(bounds: impl IntoIterator<Item = &'a TypeParamBound>, out: &mut Vec<PathRef>) {
    for b in bounds {
        if let TypeParamBound::Trait(t) = b {
            out.push(path_segments(&t.path));
        }
    }
}

/// Token text with the spacing `quote` inserts removed where Rust would not
/// write it.
pub fn render_tokens(tokens: impl ToTokens) -> String {
    let raw = tokens.to_token_stream().to_string();
    let mut out = String::with_capacity(raw.len());
    let chars: Vec<char> = raw.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        if c == ' ' {
            let prev = out.chars().last().unwrap_or(' ');
            let next = chars.get(i + 1).copied().unwrap_or(' ');
            let tight_before = matches!(next, '<' | '>' | ',' | ')' | ']' | ':' | ';');
            let tight_after = matches!(prev, '<' | '(' | '[' | '&' | ':' | '\'');
            if tight_before || tight_after {
                continue;
            }
        }
        out.push(c);
        if c == ',' {
            out.push(' ');
        }
    }
    out.replace(",  ", ", ").replace("& '", "&'")
}

fn generic_names(g: &Generics) -> Vec<String> {
    g.params
        .iter()
        .filter_map(|p| match p {
            GenericParam::Type(t) => Some(t.ident.to_string()),
            GenericParam::Const(c) => Some(c.ident.to_string()),
            GenericParam::Lifetime(_) => None,
        })
        .collect()
}

fn derives_copy(attrs: &[syn::Attribute]) -> bool {
    attrs.iter().filter(|a| a.path().is_ident("derive")).any(|a| {
        let mut found = false;
        let _ = a.parse_nested_meta(|m| {
            found |= m.path.is_ident("Copy") || m.path.segments.last().is_some_and(|s| s.ident == "Copy");
            Ok(())
        });
        found
    })
}

fn path_attr(attrs: &[syn::Attribute]) -> Option<String> {
    attrs.iter().find(|a| a.path().is_ident("path")).and_then(|a| match &a.meta {
        syn::Meta::NameValue(nv) => match &nv.value {
            syn::Expr::Lit(syn::ExprLit { lit: syn::Lit::Str(s), .. }) => Some(s.value()),
            _ => None,
        },
        _ => None,
    })
}

fn is_fn_alias(ty: &Type) -> bool {
    match ty {
        Type::BareFn(_) => true,
        Type::TraitObject(t) => t.bounds.iter().any(is_fn_bound),
        Type::ImplTrait(t) => t.bounds.iter().any(is_fn_bound),
        Type::Paren(p) => is_fn_alias(&p.elem),
        Type::Path(p) => p.path.segments.last().is_some_and(|s| match &s.arguments {
            // Box<dyn Fn(..)>, Arc<dyn Fn(..)> and the like
            syn::PathArguments::AngleBracketed(a) => {
                a.args.len() == 1 && matches!(&a.args[0], syn::GenericArgument::Type(t) if is_fn_alias(t))
            }
            _ => false,
        }),
        _ => false,
    }
}

fn is_fn_bound(b: &TypeParamBound) -> bool {
    matches!(b, TypeParamBound::Trait(t)
        if t.path.segments.last().is_some_and(|s| matches!(s.ident.to_string().as_str(), "Fn" | "FnMut" | "FnOnce")))
}

fn decl(construct: Construct, name: String, access: Accessibility, doc: Option<DocComment>, span: Span) -> Decl {
    Decl {
        construct,
        name,
        disambiguator: String::new(),
        access,
        doc,
        span: SpanInfo::of(span),
        members: Vec::new(),
        refs: Vec::new(),
        generics: Vec::new(),
    }
}

fn refs_of(ty: &Type, relation: RelationId) -> Vec<(RelationId, PathRef)> {
    let mut paths = Vec::new();
    type_paths(ty, &mut paths);
    paths.into_iter().map(|p| (relation, p)).collect()
}

fn fields(fields: &syn::Fields, inherit: Option<Accessibility>) -> Vec<Decl> {
    fields
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let (construct, name) = match &f.ident {
                Some(id) => (Construct::NamedField, id.to_string()),
                None => (Construct::TupleField, i.to_string()),
            };
            let access = inherit.unwrap_or_else(|| accessibility(&f.vis));
            let mut d = decl(construct, name, access, extract_doc_comment(&f.attrs), f.span());
            d.refs = refs_of(&f.ty, RelationId::TypeOf);
            d
        })
        .collect()
}

/// Receiver text: `self`, `&self`, `&mut self`, or `None` for no receiver.
fn receiver(sig: &syn::Signature) -> Option<String> {
    sig.receiver().map(|r| match (&r.reference, &r.mutability) {
        (Some(_), Some(_)) => "&mut self".to_string(),
        (Some(_), None) => "&self".to_string(),
        (None, _) => match &*r.ty {
            Type::Path(_) => "self".to_string(),
            other => render_tokens(other).replace("Self", "self"),
        },
    })
}

fn signature_text(sig: &syn::Signature) -> String {
    let params: Vec<String> = sig
        .inputs
        .iter()
        .map(|a| match a {
            FnArg::Receiver(_) => receiver(sig).unwrap_or_default(),
            FnArg::Typed(t) => render_tokens(&t.ty),
        })
        .collect();
    format!("({})", params.join(", "))
}

fn returns_self(sig: &syn::Signature, self_name: &str) -> bool {
    let ReturnType::Type(_, ty) = &sig.output else { return false };
    let mut paths = Vec::new();
    type_paths(ty, &mut paths);
    let is_self = |p: &PathRef| p.len() == 1 && (p[0] == "Self" || p[0] == self_name);
    // Self, Name, Result<Self, _>, Option<Self>
    match paths.first() {
        Some(p) if is_self(p) => true,
        Some(p) if matches!(p.last().map(String::as_str), Some("Result" | "Option")) => paths.get(1).is_some_and(is_self),
        _ => false,
    }
}

struct FnInfo<'a> {
    sig: &'a syn::Signature,
    attrs: &'a [syn::Attribute],
    access: Accessibility,
    span: Span,
}

fn function(info: &FnInfo, self_name: Option<&str>, trait_name: Option<&str>, generics: &[String]) -> Decl {
    let sig = info.sig;
    let name = sig.ident.to_string();
    let construct = match (self_name, receiver(sig)) {
        (None, _) => Construct::FreeFunction,
        (Some(_), Some(_)) if trait_name == Some("Drop") && name == "drop" => Construct::DropMethod,
        (Some(_), Some(_)) if trait_name.is_some_and(|t| OPERATOR_TRAITS.contains(&t)) => Construct::OperatorMethod,
        (Some(_), Some(_)) => Construct::Method,
        (Some(s), None) if returns_self(sig, s) => Construct::Constructor,
        (Some(_), None) => Construct::AssociatedFunction,
    };
    let mut d = decl(construct, name, info.access, extract_doc_comment(info.attrs), info.span);
    d.disambiguator = signature_text(sig);
    if let ReturnType::Type(_, ty) = &sig.output {
        d.refs = refs_of(ty, RelationId::Returns);
    }
    d.generics = generics.iter().cloned().chain(generic_names(&sig.generics)).collect();
    d
}

/// Folds `x(&self) -> T` plus `set_x(&mut self, T)` into one Property.
fn fold_accessors(members: Vec<Decl>, fns: &[(String, Option<String>, usize, bool)]) -> Vec<Decl> {
    let getter = |name: &str| fns.iter().any(|(n, r, params, ret)| n == name && r.as_deref() == Some("&self") && *params == 0 && *ret);
    let setter = |name: &str| {
        fns.iter().any(|(n, r, params, _)| n == &format!("set_{name}") && r.as_deref() == Some("&mut self") && *params == 1)
    };
    let pairs: Vec<String> = fns
        .iter()
        .map(|f| f.0.clone())
        .filter(|n| getter(n) && setter(n))
        .filter(|n| fns.iter().filter(|f| f.0 == *n || f.0 == format!("set_{n}")).count() == 2)
        .collect();
    if pairs.is_empty() {
        return members;
    }
    let mut out = Vec::new();
    let mut folded: Vec<Decl> = Vec::new();
    for m in members {
        let is_get = pairs.contains(&m.name);
        let is_set = m.name.strip_prefix("set_").is_some_and(|n| pairs.iter().any(|p| p == n));
        if !(is_get || is_set) {
            out.push(m);
            continue;
        }
        let base = if is_get { m.name.clone() } else { m.name["set_".len()..].to_string() };
        if let Some(p) = folded.iter_mut().find(|p| p.name == base) {
            p.span = p.span.union(m.span);
            if is_get {
                p.refs = m.refs.iter().map(|(_, r)| (RelationId::TypeOf, r.clone())).collect();
                p.doc = m.doc.or(p.doc.take());
                p.access = m.access;
            }
            continue;
        }
        let mut p = m.clone();
        p.construct = Construct::AccessorPair;
        p.name = base;
        p.disambiguator = String::new();
        p.refs = if is_get { m.refs.iter().map(|(_, r)| (RelationId::TypeOf, r.clone())).collect() } else { Vec::new() };
        folded.push(p);
    }
    out.extend(folded);
    out
}

struct Ctx<'a> {
    file: &'a Path,
    /// Inside an inline `mod { }`; `#[path]` is then relative to `dir`.
    inline: bool,
    /// Directory holding this module's child module files.
    dir: PathBuf,
}

fn module_items(items: &[Item], ctx: &Ctx, m: &mut ModuleSyntax) {
    for item in items {
        match item {
            Item::Struct(s) => {
                let access = accessibility(&s.vis);
                let c = if derives_copy(&s.attrs) { Construct::CopyStruct } else { Construct::Struct };
                let mut d = decl(c, s.ident.to_string(), access, extract_doc_comment(&s.attrs), s.span());
                d.members = fields(&s.fields, None);
                d.generics = generic_names(&s.generics);
                for f in &mut d.members {
                    f.generics = d.generics.clone();
                }
                m.decls.push(d);
            }
            Item::Union(u) => {
                let mut d = decl(Construct::Union, u.ident.to_string(), accessibility(&u.vis), extract_doc_comment(&u.attrs), u.span());
                d.members = fields(&syn::Fields::Named(u.fields.clone()), None);
                d.generics = generic_names(&u.generics);
                for f in &mut d.members {
                    f.generics = d.generics.clone();
                }
                m.decls.push(d);
            }
            Item::Enum(e) => {
                let access = accessibility(&e.vis);
                let mut d = decl(Construct::Enum, e.ident.to_string(), access, extract_doc_comment(&e.attrs), e.span());
                d.members = e
                    .variants
                    .iter()
                    .map(|v| decl(Construct::EnumVariant, v.ident.to_string(), access, extract_doc_comment(&v.attrs), v.span()))
                    .collect();
                m.decls.push(d);
            }
            Item::Trait(t) => {
                let access = accessibility(&t.vis);
                let name = t.ident.to_string();
                let mut d = decl(Construct::Trait, name.clone(), access, extract_doc_comment(&t.attrs), t.span());
                d.generics = generic_names(&t.generics);
                d.refs = t
                    .supertraits
                    .iter()
                    .filter_map(|b| match b {
                        TypeParamBound::Trait(tb) => Some((RelationId::InheritsFrom, path_segments(&tb.path))),
                        _ => None,
                    })
                    .collect();
                for ti in &t.items {
                    match ti {
                        TraitItem::Fn(f) => {
                            let info = FnInfo { sig: &f.sig, attrs: &f.attrs, access, span: f.span() };
                            d.members.push(function(&info, Some(&name), None, &d.generics));
                        }
                        TraitItem::Const(c) => {
                            let mut cd = decl(Construct::AssociatedConst, c.ident.to_string(), access, extract_doc_comment(&c.attrs), c.span());
                            cd.refs = refs_of(&c.ty, RelationId::TypeOf);
                            cd.generics = d.generics.clone();
                            d.members.push(cd);
                        }
                        TraitItem::Type(ty) => {
                            d.members.push(decl(Construct::AssociatedType, ty.ident.to_string(), access, extract_doc_comment(&ty.attrs), ty.span()));
                        }
                        _ => {}
                    }
                }
                m.decls.push(d);
            }
            Item::TraitAlias(t) => {
                m.decls.push(decl(Construct::TraitAlias, t.ident.to_string(), accessibility(&t.vis), extract_doc_comment(&t.attrs), t.span()));
            }
            Item::Type(t) => {
                let c = if is_fn_alias(&t.ty) { Construct::FnTypeAlias } else { Construct::TypeAlias };
                let mut d = decl(c, t.ident.to_string(), accessibility(&t.vis), extract_doc_comment(&t.attrs), t.span());
                d.generics = generic_names(&t.generics);
                m.decls.push(d);
            }
            Item::Fn(f) => {
                let info = FnInfo { sig: &f.sig, attrs: &f.attrs, access: accessibility(&f.vis), span: f.span() };
                m.decls.push(function(&info, None, None, &[]));
            }
            Item::Const(c) => {
                let mut d = decl(Construct::Const, c.ident.to_string(), accessibility(&c.vis), extract_doc_comment(&c.attrs), c.span());
                d.refs = refs_of(&c.ty, RelationId::TypeOf);
                m.decls.push(d);
            }
            Item::Static(s) => {
                let mut d = decl(Construct::Static, s.ident.to_string(), accessibility(&s.vis), extract_doc_comment(&s.attrs), s.span());
                d.refs = refs_of(&s.ty, RelationId::TypeOf);
                m.decls.push(d);
            }
            Item::Macro(mac) => {
                if let Some(id) = &mac.ident {
                    let access = if mac.attrs.iter().any(|a| a.path().is_ident("macro_export")) {
                        Accessibility::Public
                    } else {
                        Accessibility::Private
                    };
                    m.decls.push(decl(Construct::MacroRules, id.to_string(), access, extract_doc_comment(&mac.attrs), mac.span()));
                }
            }
            Item::ForeignMod(fm) => {
                for fi in &fm.items {
                    match fi {
                        syn::ForeignItem::Fn(f) => {
                            let info = FnInfo { sig: &f.sig, attrs: &f.attrs, access: accessibility(&f.vis), span: f.span() };
                            m.decls.push(function(&info, None, None, &[]));
                        }
                        syn::ForeignItem::Static(s) => {
                            let mut d = decl(Construct::Static, s.ident.to_string(), accessibility(&s.vis), extract_doc_comment(&s.attrs), s.span());
                            d.refs = refs_of(&s.ty, RelationId::TypeOf);
                            m.decls.push(d);
                        }
                        syn::ForeignItem::Type(t) => {
                            m.decls.push(decl(Construct::ForeignType, t.ident.to_string(), accessibility(&t.vis), extract_doc_comment(&t.attrs), t.span()));
                        }
                        _ => {}
                    }
                }
            }
            Item::Impl(imp) => {
                if let Some(block) = impl_block(imp) {
                    m.impls.push(block);
                }
            }
            Item::Use(u) => flatten_use(&u.tree, Vec::new(), &mut m.uses),
            Item::ExternCrate(e) => {
                let alias = e.rename.as_ref().map(|(_, id)| id.to_string()).unwrap_or_else(|| e.ident.to_string());
                m.uses.push(UseEntry::Alias { alias, path: vec![e.ident.to_string()] });
            }
            Item::Mod(md) => {
                let name = md.ident.to_string();
                let access = accessibility(&md.vis);
                let doc = extract_doc_comment(&md.attrs);
                let explicit = path_attr(&md.attrs);
                match &md.content {
                    Some((_, items)) => {
                        let dir = match &explicit {
                            Some(p) => ctx.dir.join(p),
                            None => ctx.dir.join(&name),
                        };
                        let mut child = ModuleSyntax {
                            path: m.path.iter().cloned().chain([name.clone()]).collect(),
                            file: ctx.file.to_path_buf(),
                            span: SpanInfo::of(md.span()),
                            access: Some(access),
                            doc: doc.or_else(|| extract_inner_doc(&md.attrs)),
                            ..ModuleSyntax::default()
                        };
                        module_items(items, &Ctx { file: ctx.file, inline: true, dir }, &mut child);
                        m.inline.push(child);
                    }
                    None => {
                        let (candidates, is_mod_rs) = match &explicit {
                            Some(p) => {
                                let path = if ctx.inline {
                                    ctx.dir.join(p)
                                } else {
                                    ctx.file.parent().unwrap_or(Path::new("")).join(p)
                                };
                                let mod_rs = path.file_name().is_some_and(|f| f == "mod.rs");
                                (vec![path], vec![mod_rs])
                            }
                            None => (vec![ctx.dir.join(format!("{name}.rs")), ctx.dir.join(&name).join("mod.rs")], vec![false, true]),
                        };
                        m.external.push(ExternalMod { name, candidates, access, doc, span: SpanInfo::of(md.span()), is_mod_rs });
                    }
                }
            }
            _ => {}
        }
    }
}

fn impl_block(imp: &syn::ItemImpl) -> Option<ImplBlock> {
    let self_path = match &*imp.self_ty {
        Type::Path(p) if p.qself.is_none() => path_segments(&p.path),
        _ => return None,
    };
    let self_name = self_path.last()?.clone();
    let trait_path = imp.trait_.as_ref().map(|(_, p, _)| path_segments(p));
    let trait_name = trait_path.as_ref().and_then(|p| p.last().cloned());
    let generics = generic_names(&imp.generics);
    let mut members = Vec::new();
    let mut fns = Vec::new();
    for item in &imp.items {
        let prefix = trait_name.as_ref().map(|t| format!("<{t}>")).unwrap_or_default();
        match item {
            ImplItem::Fn(f) => {
                let access = if trait_name.is_some() { Accessibility::Public } else { accessibility(&f.vis) };
                let info = FnInfo { sig: &f.sig, attrs: &f.attrs, access, span: f.span() };
                let mut d = function(&info, Some(&self_name), trait_name.as_deref(), &generics);
                d.disambiguator = format!("{prefix}{}", d.disambiguator);
                let params = f.sig.inputs.iter().filter(|a| matches!(a, FnArg::Typed(_))).count();
                fns.push((d.name.clone(), receiver(&f.sig), params, matches!(f.sig.output, ReturnType::Type(..))));
                members.push(d);
            }
            ImplItem::Const(c) => {
                let access = if trait_name.is_some() { Accessibility::Public } else { accessibility(&c.vis) };
                let mut d = decl(Construct::AssociatedConst, c.ident.to_string(), access, extract_doc_comment(&c.attrs), c.span());
                d.disambiguator = prefix;
                d.refs = refs_of(&c.ty, RelationId::TypeOf);
                d.generics = generics.clone();
                members.push(d);
            }
            ImplItem::Type(t) => {
                let access = if trait_name.is_some() { Accessibility::Public } else { accessibility(&t.vis) };
                let mut d = decl(Construct::AssociatedType, t.ident.to_string(), access, extract_doc_comment(&t.attrs), t.span());
                d.disambiguator = prefix;
                d.refs = refs_of(&t.ty, RelationId::TypeOf);
                d.generics = generics.clone();
                members.push(d);
            }
            _ => {}
        }
    }
    if trait_name.is_none() {
        members = fold_accessors(members, &fns);
    }
    Some(ImplBlock { self_path, trait_path, generics, members })
}

fn flatten_use(tree: &UseTree, prefix: PathRef, out: &mut Vec<UseEntry>) {
    match tree {
        UseTree::Path(p) => {
            let mut next = prefix;
            next.push(p.ident.to_string());
            flatten_use(&p.tree, next, out);
        }
        UseTree::Name(n) => {
            let name = n.ident.to_string();
            if name == "self" {
                if let Some(last) = prefix.last().cloned() {
                    out.push(UseEntry::Alias { alias: last, path: prefix });
                }
            } else {
                let mut path = prefix;
                path.push(name.clone());
                out.push(UseEntry::Alias { alias: name, path });
            }
        }
        UseTree::Rename(r) => {
            let mut path = prefix;
            let name = r.ident.to_string();
            if name != "self" {
                path.push(name);
            }
            out.push(UseEntry::Alias { alias: r.rename.to_string(), path });
        }
        UseTree::Glob(_) => out.push(UseEntry::Glob(prefix)),
        UseTree::Group(g) => {
            for t in &g.items {
                flatten_use(t, prefix.clone(), out);
            }
        }
    }
}

/// Parses one file as the module at `path`. `mod_rs` says whether child
/// modules live next to the file (crate roots, `mod.rs`) or in a directory
/// named after it.
pub fn parse_module(file: &Path, source: &str, path: Vec<String>, mod_rs: bool) -> ModuleSyntax {
    let lines = source.lines().count().max(1) as u32;
    let last_col = source.lines().last().map_or(0, |l| l.chars().count()) as u32 + 1;
    let mut m = ModuleSyntax {
        path,
        file: file.to_path_buf(),
        span: SpanInfo { start: (1, 1), end: (lines, last_col) },
        ..ModuleSyntax::default()
    };
    let parsed = match syn::parse_file(source) {
        Ok(f) => f,
        Err(e) => {
            let at = e.span().start();
            m.error = Some((e.to_string(), (at.line as u32, at.column as u32 + 1)));
            return m;
        }
    };
    m.doc = extract_inner_doc(&parsed.attrs);
    let parent = file.parent().unwrap_or(Path::new("")).to_path_buf();
    let dir = if mod_rs { parent } else { parent.join(file.file_stem().unwrap_or_default()) };
    module_items(&parsed.items, &Ctx { file, inline: false, dir }, &mut m);
    m
}
