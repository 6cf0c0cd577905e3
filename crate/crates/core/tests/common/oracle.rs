//! Reference implementations written independently of the library: a query
//! AST generator with its own interpreter, a tiny backtracking regex matcher,
//! and the visibility predicate straight from its definition.

use std::collections::BTreeSet;

use codecarta_core::model::DocSpan;
use codecarta_core::{Entity, EntityGraph, EntityKind, Severity, Token};
use rand::seq::SliceRandom;
use rand::Rng;

// ------------------------------------------------------------ expressions

#[derive(Debug, Clone)]
pub enum Val {
    B(bool),
    N(f64),
    S(String),
    Null,
}

#[derive(Debug, Clone)]
pub enum Ast {
    Bool(bool),
    Num(f64),
    Str(String),
    Field(&'static str),
    Not(Box<Ast>),
    And(Box<Ast>, Box<Ast>),
    Or(Box<Ast>, Box<Ast>),
    Cmp(&'static str, Box<Ast>, Box<Ast>),
    Call(&'static str, Vec<Ast>),
}

const BOOL_FIELDS: [&str; 4] = ["isStatic", "hasErrors", "hasWarnings", "hasDoc"];
const NUM_FIELDS: [&str; 3] = ["memberCount", "instanceMemberCount", "staticMemberCount"];
const STR_FIELDS: [&str; 2] = ["name", "kind"];
const OPT_FIELDS: [&str; 3] = ["typeKind", "methodKind", "accessibility"];
const ORDERINGS: [&str; 4] = ["<", "<=", ">", ">="];

/// Patterns for `matches()` with hand-written equivalents.
pub const NAME_PATTERNS: [&str; 5] = ["^I[A-Z]", "e$", "^[a-z]", "rv", "^...$"];

fn pattern_oracle(pattern: &str, s: &str) -> bool {
    let chars: Vec<char> = s.chars().collect();
    match pattern {
        "^I[A-Z]" => chars.len() >= 2 && chars[0] == 'I' && chars[1].is_ascii_uppercase(),
        "e$" => s.ends_with('e'),
        "^[a-z]" => chars.first().is_some_and(|c| c.is_ascii_lowercase()),
        "rv" => s.contains("rv"),
        "^...$" => chars.len() == 3,
        _ => unreachable!(),
    }
}

fn vocabulary(field: &str) -> Option<&'static [&'static str]> {
    Some(match field {
        "kind" => &["solution", "project", "package", "namespace", "type", "field", "method", "property", "event"],
        "typeKind" => &["class", "struct", "enum", "interface", "delegate"],
        "accessibility" => &["public", "internal", "protected", "protectedInternal", "privateProtected", "private"],
        "methodKind" => &["ordinary", "constructor", "getter", "setter", "operator", "other:finalizer"],
        _ => return None,
    })
}

fn string_literals() -> Vec<String> {
    let mut out: Vec<String> = super::NAMES.iter().map(|s| s.to_string()).collect();
    out.extend(EntityKind::ALL.iter().map(|k| k.as_str().to_string()));
    out.extend(["class", "struct", "enum", "interface", "delegate"].map(String::from));
    out.extend(["public", "private", "internal", "protected", "ordinary", "constructor", "other:finalizer"].map(String::from));
    out.extend(["", "e", "a \"quoted\" \\ word", "numbers", "ser"].map(String::from));
    out
}

pub fn gen_bool<R: Rng>(rng: &mut R, depth: u32) -> Ast {
    let leaf = depth == 0 || rng.gen_bool(0.25);
    if leaf {
        return match rng.gen_range(0..3) {
            0 => Ast::Bool(rng.gen()),
            _ => Ast::Field(BOOL_FIELDS.choose(rng).unwrap()),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..9) {
        0 => Ast::Not(Box::new(gen_bool(rng, d))),
        1 => Ast::And(Box::new(gen_bool(rng, d)), Box::new(gen_bool(rng, d))),
        2 => Ast::Or(Box::new(gen_bool(rng, d)), Box::new(gen_bool(rng, d))),
        3 => {
            let op = *["==", "!=", "<", "<=", ">", ">="].choose(rng).unwrap();
            Ast::Cmp(op, Box::new(gen_num(rng)), Box::new(gen_num(rng)))
        }
        4 => {
            let op = *["==", "!=", "<", "<=", ">", ">="].choose(rng).unwrap();
            let (mut a, mut b) = (gen_str(rng), gen_str(rng));
            // equality between an enum field and a literal outside its
            // vocabulary is a compile error; keep generated queries valid
            if matches!(op, "==" | "!=") {
                if let (Ast::Field(f), Ast::Str(_)) = (&a, &b) {
                    if let Some(values) = vocabulary(f) {
                        b = Ast::Str(values.choose(rng).unwrap().to_string());
                    }
                }
                if let (Ast::Str(_), Ast::Field(f)) = (&a, &b) {
                    if let Some(values) = vocabulary(f) {
                        a = Ast::Str(values.choose(rng).unwrap().to_string());
                    }
                }
            }
            Ast::Cmp(op, Box::new(a), Box::new(b))
        }
        5 => {
            let op = *["==", "!="].choose(rng).unwrap();
            Ast::Cmp(op, Box::new(gen_bool(rng, d)), Box::new(gen_bool(rng, d)))
        }
        6 => {
            let field = *["kind", "typeKind", "accessibility", "methodKind"].choose(rng).unwrap();
            let value = vocabulary(field).unwrap().choose(rng).unwrap().to_string();
            let op = *["==", "!="].choose(rng).unwrap();
            Ast::Cmp(op, Box::new(Ast::Field(field)), Box::new(Ast::Str(value)))
        }
        7 => match rng.gen_range(0..4) {
            0 => Ast::Call("docContains", vec![gen_str(rng)]),
            1 => Ast::Call("matches", vec![gen_str(rng), Ast::Str(NAME_PATTERNS.choose(rng).unwrap().to_string())]),
            _ => Ast::Call(["contains", "startsWith", "endsWith"].choose(rng).unwrap(), vec![gen_str(rng), gen_str(rng)]),
        },
        _ => Ast::Cmp(ORDERINGS.choose(rng).unwrap(), Box::new(Ast::Field(NUM_FIELDS.choose(rng).unwrap())), Box::new(gen_num(rng))),
    }
}

fn gen_num<R: Rng>(rng: &mut R) -> Ast {
    if rng.gen_bool(0.5) {
        Ast::Field(NUM_FIELDS.choose(rng).unwrap())
    } else {
        let n = rng.gen_range(-3..12) as f64;
        Ast::Num(if rng.gen_bool(0.2) { n + 0.5 } else { n })
    }
}

fn gen_str<R: Rng>(rng: &mut R) -> Ast {
    match rng.gen_range(0..4) {
        0 => Ast::Field(STR_FIELDS.choose(rng).unwrap()),
        1 => Ast::Field(OPT_FIELDS.choose(rng).unwrap()),
        _ => Ast::Str(string_literals().choose(rng).unwrap().clone()),
    }
}

/// Fully parenthesized source text.
pub fn render(ast: &Ast) -> String {
    match ast {
        Ast::Bool(b) => b.to_string(),
        Ast::Num(n) => format!("{n}"),
        Ast::Str(s) => format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"")),
        Ast::Field(f) => f.to_string(),
        Ast::Not(a) => format!("!({})", render(a)),
        Ast::And(a, b) => format!("({}) && ({})", render(a), render(b)),
        Ast::Or(a, b) => format!("({}) || ({})", render(a), render(b)),
        Ast::Cmp(op, a, b) => format!("({}) {op} ({})", render(a), render(b)),
        Ast::Call(f, args) => format!("{f}({})", args.iter().map(render).collect::<Vec<_>>().join(", ")),
    }
}

fn doc_text(e: &Entity) -> Option<String> {
    let doc = e.doc_comment.as_ref()?;
    let mut paragraphs = Vec::new();
    for p in &doc.paragraphs {
        let mut text = String::new();
        for span in p {
            match span {
                DocSpan::Text(t) | DocSpan::Code(t) => text += t,
            }
        }
        paragraphs.push(text);
    }
    Some(paragraphs.join("\n\n"))
}

fn field(e: &Entity, name: &str) -> Val {
    match name {
        "name" => Val::S(e.name.clone()),
        "kind" => Val::S(e.kind.as_str().into()),
        "typeKind" => e.type_kind.map_or(Val::Null, |k| Val::S(k.as_str().into())),
        "methodKind" => e.method_kind.as_ref().map_or(Val::Null, |k| Val::S(k.label())),
        "accessibility" => e.accessibility.map_or(Val::Null, |a| Val::S(a.as_str().into())),
        "isStatic" => Val::B(e.is_static),
        "memberCount" => Val::N((e.instance_member_count + e.static_member_count) as f64),
        "instanceMemberCount" => Val::N(e.instance_member_count as f64),
        "staticMemberCount" => Val::N(e.static_member_count as f64),
        "hasErrors" => Val::B(e.diagnostics.iter().any(|d| d.severity == Severity::Error)),
        "hasWarnings" => Val::B(e.diagnostics.iter().any(|d| d.severity == Severity::Warning)),
        "hasDoc" => Val::B(e.doc_comment.is_some()),
        _ => unreachable!(),
    }
}

/// `Err(())` stands for a runtime error.
pub fn interpret(ast: &Ast, e: &Entity) -> Result<Val, ()> {
    Ok(match ast {
        Ast::Bool(b) => Val::B(*b),
        Ast::Num(n) => Val::N(*n),
        Ast::Str(s) => Val::S(s.clone()),
        Ast::Field(f) => field(e, f),
        Ast::Not(a) => Val::B(!as_bool(interpret(a, e)?)),
        Ast::And(a, b) => Val::B(as_bool(interpret(a, e)?) && as_bool(interpret(b, e)?)),
        Ast::Or(a, b) => Val::B(as_bool(interpret(a, e)?) || as_bool(interpret(b, e)?)),
        Ast::Cmp(op, a, b) => {
            let (x, y) = (interpret(a, e)?, interpret(b, e)?);
            let equal = match (&x, &y) {
                (Val::Null, _) | (_, Val::Null) => None,
                (Val::B(p), Val::B(q)) => Some(p == q),
                (Val::N(p), Val::N(q)) => Some(p == q),
                (Val::S(p), Val::S(q)) => Some(p == q),
                _ => unreachable!(),
            };
            Val::B(match *op {
                "==" => equal == Some(true),
                "!=" => equal != Some(true),
                _ => {
                    let less = match (&x, &y) {
                        (Val::Null, _) | (_, Val::Null) => return Err(()),
                        (Val::N(p), Val::N(q)) => p < q,
                        (Val::S(p), Val::S(q)) => p.as_bytes() < q.as_bytes(),
                        _ => unreachable!(),
                    };
                    let eq = equal == Some(true);
                    match *op {
                        "<" => less,
                        "<=" => less || eq,
                        ">" => !less && !eq,
                        ">=" => !less,
                        _ => unreachable!(),
                    }
                }
            })
        }
        Ast::Call(f, args) => {
            let mut s = Vec::new();
            for a in args {
                match interpret(a, e)? {
                    Val::S(v) => s.push(v),
                    Val::Null => return Err(()),
                    _ => unreachable!(),
                }
            }
            Val::B(match *f {
                "docContains" => doc_text(e).is_some_and(|d| d.to_lowercase().contains(&s[0].to_lowercase())),
                "contains" => s[0].contains(&s[1]),
                "startsWith" => s[0].starts_with(&s[1]),
                "endsWith" => s[0].ends_with(&s[1]),
                "matches" => pattern_oracle(&s[1], &s[0]),
                _ => unreachable!(),
            })
        }
    })
}

fn as_bool(v: Val) -> bool {
    matches!(v, Val::B(true))
}

// ------------------------------------------------------------ regex mode

#[derive(Debug, Clone)]
enum Atom {
    Lit(char),
    Any,
    Range(char, char),
}

#[derive(Debug, Clone)]
pub struct MiniRegex {
    start: bool,
    end: bool,
    items: Vec<(Atom, char)>,
}

impl MiniRegex {
    pub fn generate<R: Rng>(rng: &mut R) -> Self {
        let n = rng.gen_range(1..5);
        let items = (0..n)
            .map(|_| {
                let atom = match rng.gen_range(0..6) {
                    0 => Atom::Any,
                    1 => [Atom::Range('a', 'z'), Atom::Range('A', 'Z'), Atom::Range('0', '9')].choose(rng).unwrap().clone(),
                    _ => Atom::Lit(*['a', 'e', 'i', 'I', 'o', 'r', 'v', 'S', 'P', 'x', '_'].choose(rng).unwrap()),
                };
                (atom, *[' ', ' ', ' ', '*', '+', '?'].choose(rng).unwrap())
            })
            .collect();
        MiniRegex { start: rng.gen_bool(0.3), end: rng.gen_bool(0.3), items }
    }

    pub fn source(&self) -> String {
        let mut s = String::new();
        if self.start {
            s.push('^');
        }
        for (atom, q) in &self.items {
            match atom {
                Atom::Lit(c) => s.push(*c),
                Atom::Any => s.push('.'),
                Atom::Range(a, b) => s += &format!("[{a}-{b}]"),
            }
            if *q != ' ' {
                s.push(*q);
            }
        }
        if self.end {
            s.push('$');
        }
        s
    }

    fn atom_matches(atom: &Atom, c: char) -> bool {
        match atom {
            Atom::Lit(l) => *l == c,
            Atom::Any => c != '\n',
            Atom::Range(a, b) => *a <= c && c <= *b,
        }
    }

    fn match_here(&self, item: usize, text: &[char], at: usize) -> bool {
        if item == self.items.len() {
            return !self.end || at == text.len();
        }
        let (atom, q) = &self.items[item];
        let (min, max) = match q {
            '*' => (0, usize::MAX),
            '+' => (1, usize::MAX),
            '?' => (0, 1),
            _ => (1, 1),
        };
        let mut count = 0;
        while count < max && at + count < text.len() && Self::atom_matches(atom, text[at + count]) {
            count += 1;
        }
        (min..=count).rev().any(|k| self.match_here(item + 1, text, at + k))
    }

    pub fn is_match(&self, s: &str) -> bool {
        let text: Vec<char> = s.chars().collect();
        if self.start {
            return self.match_here(0, &text, 0);
        }
        (0..=text.len()).any(|at| self.match_here(0, &text, at))
    }
}

// ------------------------------------------------------------ view model

/// Visibility straight from its definition, with ancestry via rendered
/// token prefixes.
pub fn visible_by_definition(
    g: &EntityGraph,
    expanded: &BTreeSet<Token>,
    removed: &BTreeSet<Token>,
    kinds: &BTreeSet<EntityKind>,
) -> BTreeSet<Token> {
    let expanded: BTreeSet<String> = expanded.iter().map(|t| t.to_string()).collect();
    let removed: BTreeSet<String> = removed.iter().map(|t| t.to_string()).collect();
    g.entities
        .values()
        .filter(|e| {
            let text = e.token.to_string();
            let parts: Vec<&str> = text.split('.').collect();
            let ancestors: Vec<String> = (1..parts.len()).map(|k| parts[..k].join(".")).collect();
            kinds.contains(&e.kind)
                && !removed.contains(&text)
                && ancestors.iter().all(|a| expanded.contains(a) && !removed.contains(a))
        })
        .map(|e| e.token.clone())
        .collect()
}

/// Visible matches plus their visible ancestors, found through string
/// prefixes.
pub fn ancestor_closure(matches: &BTreeSet<Token>, visible: &BTreeSet<Token>) -> BTreeSet<Token> {
    let wanted: Vec<String> = matches.intersection(visible).map(|t| t.to_string()).collect();
    visible
        .iter()
        .filter(|v| {
            let v = v.to_string();
            wanted.iter().any(|m| *m == v || m.starts_with(&format!("{v}.")))
        })
        .cloned()
        .collect()
}
