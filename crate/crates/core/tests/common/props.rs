//! Property checks shared by the integration tests and the acceptance run.
//! Each check draws one random case and reports the first violation.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;

use codecarta_core::glyph::{glyph_for, Effect, GlyphConfig, LineStyle, ScalingMode};
use codecarta_core::filter::{apply, compile_query, evaluate, MatchAction, Query, QueryMode};
use codecarta_core::layout::{tidy_tree_polar, Forest, LayoutConfig, LayoutGraph, LayoutState};
use codecarta_core::serializer::{deserialize, serialize};
use codecarta_core::token::{assign_tokens, ForestNode, SiblingKey};
use codecarta_core::view::{default_view, full_view, ViewState};
use codecarta_core::{
    Accessibility, Diagnostic, Entity, EntityGraph, EntityKind, RelationId, Severity, Token, TypeKind,
};
use rand::seq::SliceRandom;
use rand::Rng;

use super::oracle::{ancestor_closure, gen_bool, interpret, render, visible_by_definition, MiniRegex, Val};
use super::{random_graph, random_name, random_parents};

pub fn forest_of(parents: &[Option<usize>]) -> Forest {
    // give every node its real declares token so token order = pre-order
    let mut tokens: Vec<Token> = Vec::with_capacity(parents.len());
    let mut next = vec![0u32; parents.len()];
    let mut roots = 0;
    for p in parents {
        let t = match p {
            Some(p) => {
                next[*p] += 1;
                tokens[*p].child(next[*p] - 1)
            }
            None => {
                roots += 1;
                Token::root(roots - 1)
            }
        };
        tokens.push(t);
    }
    Forest { nodes: tokens, parents: parents.to_vec() }
}

/// Leaves under `node` in pre-order.
fn subtree_leaves(children: &[Vec<usize>], node: usize, out: &mut Vec<usize>) {
    if children[node].is_empty() {
        out.push(node);
    }
    for &c in &children[node] {
        subtree_leaves(children, c, out);
    }
}

pub fn check_tidy_tree(parents: &[Option<usize>], cfg: &LayoutConfig) -> Result<(), String> {
    let forest = forest_of(parents);
    let polar = tidy_tree_polar(&forest, cfg).map_err(|e| e.to_string())?;
    let n = parents.len();
    let mut depth = vec![0usize; n];
    let mut children = vec![Vec::new(); n];
    for i in 0..n {
        if let Some(p) = parents[i] {
            depth[i] = depth[p] + 1;
            children[p].push(i);
        }
    }
    for i in 0..n {
        let (r, a) = polar[i];
        if r != depth[i] as f64 * cfg.ring_spacing {
            return Err(format!("node {i} radius {r} at depth {}", depth[i]));
        }
        if !(0.0..TAU).contains(&a) {
            return Err(format!("node {i} angle {a} outside [0, 2π)"));
        }
    }
    // each subtree's angular extent, from the angles of all its nodes
    let extent = |root: usize| {
        let mut stack = vec![root];
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        while let Some(v) = stack.pop() {
            lo = lo.min(polar[v].1);
            hi = hi.max(polar[v].1);
            stack.extend(&children[v]);
        }
        (lo, hi)
    };
    for p in 0..n {
        let kids = &children[p];
        if kids.is_empty() {
            continue;
        }
        let ext: Vec<(f64, f64)> = kids.iter().map(|&k| extent(k)).collect();
        for a in 0..ext.len() {
            for b in a + 1..ext.len() {
                let (x, y) = (ext[a], ext[b]);
                if !(x.1 < y.0 || y.1 < x.0) {
                    return Err(format!("children {} and {} of {p} overlap: {x:?} {y:?}", kids[a], kids[b]));
                }
            }
        }
        let lo = ext.iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
        let hi = ext.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
        let a = polar[p].1;
        if parents[p].is_some() && !(lo - 1e-12 <= a && a <= hi + 1e-12) {
            return Err(format!("node {p} at {a} outside its children's span [{lo}, {hi}]"));
        }
    }
    // adjacent leaves keep the minimum gap when the tree fits on the circle
    let mut leaves = Vec::new();
    for r in (0..n).filter(|&i| parents[i].is_none()) {
        subtree_leaves(&children, r, &mut leaves);
    }
    if leaves.len() > 1 && (leaves.len() as f64) * 2.0 * cfg.min_angular_gap <= TAU {
        for w in leaves.windows(2) {
            let gap = polar[w[1]].1 - polar[w[0]].1;
            if gap + 1e-12 < cfg.min_angular_gap {
                return Err(format!("leaves {} and {} only {gap} apart", w[0], w[1]));
            }
        }
    }
    Ok(())
}

/// Root of `f` in `[lo, hi]` by bisection.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    assert!(f(lo) * f(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Two connected nodes against the force-balance root. Returns the settled
/// distance and the root.
pub fn two_node_equilibrium() -> (f64, f64) {
    let cfg = LayoutConfig::default();
    let f = &cfg.forces;
    // each node has degree 1, so mass 2; symmetric about the origin, each
    // feels gravity g·m toward it and the pair feels repulsion kr·m·m/d
    let m = 2.0;
    let balance = |d: f64| f.repulsion_strength * m * m / d - d - f.gravity * m;
    let expected = bisect(balance, 1e-6, 1e3);

    let graph = LayoutGraph::new(vec![Token::root(0), Token::root(1)], [(0, 1)], vec![0.0; 2]);
    let mut state = LayoutState::new(vec![[-20.0, 3.0], [20.0, -3.0]], cfg.clone(), 5);
    for _ in 0..3000 {
        state.step(&graph);
    }
    let [a, b] = [state.positions[0], state.positions[1]];
    ((a[0] - b[0]).hypot(a[1] - b[1]), expected)
}

/// One random configuration with some nodes pinned; pinned nodes must not move.
pub fn check_pinned<R: Rng>(rng: &mut R) -> Result<(), String> {
    let n = rng.gen_range(2..40);
    let parents = random_parents(rng, n, 1);
    let extra: Vec<(usize, usize)> = (0..n / 3).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
    let pairs: Vec<(usize, usize)> =
        parents.iter().enumerate().filter_map(|(i, p)| p.map(|p| (p, i))).chain(extra).collect();
    let nodes = (0..n as u32).map(Token::root).collect();
    let graph = LayoutGraph::new(nodes, pairs, (0..n).map(|_| rng.gen_range(0.0..10.0)).collect());
    let mut cfg = LayoutConfig::default();
    cfg.forces.repulsion_strength = rng.gen_range(0.0..50.0);
    cfg.forces.gravity = rng.gen_range(0.0..5.0);
    cfg.forces.edge_weight_influence = rng.gen_range(0.0..2.0);
    cfg.forces.adjust_sizes = rng.gen();
    cfg.forces.theta_approx = rng.gen_range(0.0..1.5);
    let start: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen_range(-100.0..100.0), rng.gen_range(-100.0..100.0)]).collect();
    let mut state = LayoutState::new(start.clone(), cfg, rng.gen());
    state.pinned = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
    for _ in 0..20 {
        state.step(&graph);
    }
    for &i in &state.pinned {
        if state.positions[i] != start[i] {
            return Err(format!("pinned node {i} moved from {:?} to {:?}", start[i], state.positions[i]));
        }
    }
    if !state.positions.iter().all(|p| p[0].is_finite() && p[1].is_finite()) {
        return Err("non-finite position".into());
    }
    Ok(())
}

/// Windows whose swing did not exceed the previous window's, and the number
/// of window pairs, over `graphs` random graphs.
pub fn falling_windows<R: Rng>(rng: &mut R, graphs: usize) -> (usize, usize) {
    let (mut falling, mut windows) = (0, 0);
    for k in 0..graphs {
        let g = random_graph(rng, 50 + 40 * k);
        let sums = window_swings(&g, 1);
        for w in sums.windows(2) {
            windows += 1;
            falling += usize::from(w[1] <= w[0]);
        }
    }
    (falling, windows)
}

/// Total swing summed over consecutive 50-iteration windows of a run that
/// stops the way `run_layout` does.
pub fn window_swings(g: &codecarta_core::EntityGraph, seed: u64) -> Vec<f64> {
    let vs = full_view(g, [RelationId::TypeOf, RelationId::InheritsFrom]);
    let graph = LayoutGraph::from_view(g, &vs, |_| 0.0);
    let cfg = LayoutConfig::default();
    let start = codecarta_core::layout::seed_positions(g, vs.visible(), &cfg, seed);
    let mut state = LayoutState::new(graph.nodes.iter().map(|t| start[t]).collect(), cfg.clone(), seed);
    let mut sums = Vec::new();
    let mut sum = 0.0;
    while state.iteration < cfg.max_iterations {
        sum += state.step(&graph).total_swing;
        if state.iteration.is_multiple_of(50) {
            sums.push(sum);
            sum = 0.0;
        }
        if state.converged() {
            break;
        }
    }
    sums
}


const KEY_KINDS: [EntityKind; 6] = [
    EntityKind::Project,
    EntityKind::Package,
    EntityKind::Namespace,
    EntityKind::Type,
    EntityKind::Method,
    EntityKind::Field,
];

/// A random forest of `n` nodes whose sibling keys are unique.
pub fn random_keyed_forest<R: Rng>(rng: &mut R, n: usize) -> Vec<ForestNode> {
    let roots = rng.gen_range(1..4);
    let parents = random_parents(rng, n, roots);
    let mut seen: BTreeSet<(Option<usize>, SiblingKey)> = BTreeSet::new();
    let mut nodes = Vec::with_capacity(n);
    for parent in parents {
        let kind = *KEY_KINDS.choose(rng).unwrap();
        let name = random_name(rng);
        let mut dis = if rng.gen_bool(0.2) { format!("({})", rng.gen_range(0..3)) } else { String::new() };
        let mut key = SiblingKey::new(kind, name.clone(), dis.clone());
        let mut bump = 0;
        while seen.contains(&(parent, key.clone())) {
            bump += 1;
            dis = format!("/{bump}");
            key = SiblingKey::new(kind, name.clone(), dis.clone());
        }
        seen.insert((parent, key.clone()));
        nodes.push(ForestNode { parent, key });
    }
    nodes
}

/// Tokens of a random forest: unique, consistent with parent links and
/// sibling order, independent of input order, and round-tripping as text.
pub fn check_token_forest<R: Rng>(rng: &mut R, n: usize) -> Result<(), String> {
    let nodes = random_keyed_forest(rng, n);
    let tokens = assign_tokens(&nodes).map_err(|e| e.to_string())?;
    let distinct: BTreeSet<&Token> = tokens.iter().collect();
    if distinct.len() != tokens.len() {
        return Err("two nodes share a token".into());
    }

    // ordinals are the rank of each key among its siblings
    let mut siblings: BTreeMap<Option<usize>, Vec<usize>> = BTreeMap::new();
    for (i, node) in nodes.iter().enumerate() {
        siblings.entry(node.parent).or_default().push(i);
    }
    for (parent, mut list) in siblings {
        list.sort_by(|&a, &b| {
            let (x, y) = (&nodes[a].key, &nodes[b].key);
            (x.rank, x.name.as_bytes(), x.disambiguator.as_bytes()).cmp(&(y.rank, y.name.as_bytes(), y.disambiguator.as_bytes()))
        });
        for (ordinal, &i) in list.iter().enumerate() {
            let expected = match parent {
                Some(p) => format!("{}.{ordinal}", tokens[p]),
                None => ordinal.to_string(),
            };
            if tokens[i].to_string() != expected {
                return Err(format!("node {i} got {} instead of {expected}", tokens[i]));
            }
        }
    }

    // shuffling the input and renumbering parents changes nothing
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.shuffle(rng);
    let mut position = vec![0; nodes.len()];
    for (new, &old) in order.iter().enumerate() {
        position[old] = new;
    }
    let shuffled: Vec<ForestNode> = order
        .iter()
        .map(|&old| ForestNode { parent: nodes[old].parent.map(|p| position[p]), key: nodes[old].key.clone() })
        .collect();
    let again = assign_tokens(&shuffled).map_err(|e| e.to_string())?;
    for (old, t) in tokens.iter().enumerate() {
        if &again[position[old]] != t {
            return Err(format!("node {old} moved from {t} to {} under permutation", again[position[old]]));
        }
    }

    // ancestry agrees with the string-prefix reading
    for _ in 0..50 {
        let a = tokens.choose(rng).unwrap();
        let b = tokens.choose(rng).unwrap();
        let by_text = b.to_string().starts_with(&format!("{a}."));
        if a.is_ancestor_of(b) != by_text {
            return Err(format!("is_ancestor_of({a}, {b}) disagrees with prefix test"));
        }
    }
    for t in &tokens {
        let back: Token = t.to_string().parse().map_err(|e| format!("{t}: {e}"))?;
        if &back != t {
            return Err(format!("{t} parsed back as {back}"));
        }
    }
    Ok(())
}

/// Serializing is lossless and canonical: a shuffled document with the same
/// content serializes to the same bytes.
pub fn check_serializer_round_trip<R: Rng>(rng: &mut R, n: usize) -> Result<(), String> {
    let g = random_graph(rng, n);
    let bytes = serialize(&g).map_err(|e| e.to_string())?;
    let back = deserialize(&bytes).map_err(|e| e.to_string())?;
    if back != g {
        return Err("graph changed across a round trip".into());
    }
    let mut doc: serde_json::Value = serde_json::from_slice(&bytes).map_err(|e| e.to_string())?;
    for (_, v) in doc.as_object_mut().unwrap().iter_mut() {
        if let Some(list) = v.as_array_mut() {
            list.shuffle(rng);
        }
    }
    let shuffled = serde_json::to_vec(&doc).unwrap();
    let again = serialize(&deserialize(&shuffled).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    if again != bytes {
        return Err("reordered input serialized differently".into());
    }
    Ok(())
}

fn check_view(g: &EntityGraph, vs: &ViewState, step: &str) -> Result<(), String> {
    let expected = visible_by_definition(g, &vs.expanded, &vs.removed, &vs.enabled_kinds);
    if vs.visible() != &expected {
        let extra: Vec<_> = vs.visible().difference(&expected).take(3).collect();
        let missing: Vec<_> = expected.difference(vs.visible()).take(3).collect();
        return Err(format!("after {step}: extra {extra:?}, missing {missing:?}"));
    }
    if !vs.highlighted.is_subset(vs.visible()) {
        return Err(format!("after {step}: highlight outside the visible set"));
    }
    if !vs.enabled_relations.contains(&RelationId::Declares) {
        return Err(format!("after {step}: declares disabled"));
    }
    Ok(())
}

/// A random sequence of view operations; the cached visible set must match
/// the definition after every one.
pub fn check_view_sequence<R: Rng>(rng: &mut R, n: usize, ops: usize) -> Result<(), String> {
    let g = random_graph(rng, n);
    let mut vs = default_view(&g);
    check_view(&g, &vs, "start")?;
    let all: Vec<Token> = g.entities.keys().cloned().collect();
    for _ in 0..ops {
        let visible: Vec<Token> = vs.visible().iter().cloned().collect();
        let pick = |rng: &mut R| if visible.is_empty() || rng.gen_bool(0.1) { all.choose(rng).unwrap().clone() } else { visible.choose(rng).unwrap().clone() };
        let step;
        match rng.gen_range(0..100) {
            0..=44 => {
                let t = pick(rng);
                step = format!("toggle {t}");
                match vs.toggle_expand(&g, &t) {
                    Ok(next) => vs = next,
                    Err(_) if !vs.is_visible(&t) => {}
                    Err(e) => return Err(format!("{step}: {e}")),
                }
            }
            45..=59 => {
                let t = pick(rng);
                step = format!("remove {t}");
                match vs.remove(&g, &t) {
                    Ok(next) => vs = next,
                    Err(_) if !vs.is_visible(&t) => {}
                    Err(e) => return Err(format!("{step}: {e}")),
                }
            }
            60..=67 => {
                step = "refresh".into();
                vs = vs.refresh(&g);
                if !vs.removed.is_empty() || !vs.highlighted.is_empty() {
                    return Err("refresh kept removals or highlights".into());
                }
            }
            68..=79 => {
                let kind = *EntityKind::ALL.choose(rng).unwrap();
                let on = rng.gen();
                step = format!("kind {kind} {on}");
                vs = vs.set_kind_enabled(&g, kind, on);
            }
            80..=84 => {
                let relation = *RelationId::ALL.choose(rng).unwrap();
                step = format!("relation {relation:?}");
                vs = vs.set_relation_enabled(relation, rng.gen());
            }
            85..=92 => {
                let k = rng.gen_range(0..4).min(visible.len());
                let matches: BTreeSet<Token> = visible.choose_multiple(rng, k).cloned().collect();
                step = format!("highlight {}", matches.len());
                vs = apply(&matches, MatchAction::Highlight, &vs);
            }
            _ => {
                let k = rng.gen_range(1..4).min(visible.len());
                let matches: BTreeSet<Token> = visible.choose_multiple(rng, k).cloned().collect();
                step = format!("isolate {}", matches.len());
                let before = vs.visible().clone();
                vs = apply(&matches, MatchAction::Isolate, &vs);
                if vs.visible() != &ancestor_closure(&matches, &before) {
                    return Err(format!("{step}: not the ancestor closure"));
                }
            }
        }
        check_view(&g, &vs, &step)?;
    }
    Ok(())
}

/// Collapsing a visible node and expanding it again restores the view.
pub fn check_collapse_expand<R: Rng>(rng: &mut R, n: usize) -> Result<(), String> {
    let g = random_graph(rng, n);
    let vs = full_view(&g, []);
    let candidates: Vec<&Token> = vs.visible().iter().filter(|t| vs.expanded.contains(*t)).collect();
    let Some(t) = candidates.choose(rng) else { return Ok(()) };
    let back = vs.toggle_expand(&g, t).and_then(|c| c.toggle_expand(&g, t)).map_err(|e| e.to_string())?;
    if back.visible() != vs.visible() {
        return Err(format!("collapse/expand of {t} changed the visible set"));
    }
    Ok(())
}

fn random_scope<R: Rng>(rng: &mut R, g: &EntityGraph) -> BTreeSet<Token> {
    let keep = rng.gen_range(0.2..1.0);
    g.entities.keys().filter(|_| rng.gen_bool(keep)).cloned().collect()
}

#[derive(Debug, Default, Clone, Copy)]
pub struct Outcomes {
    pub matched: usize,
    pub missed: usize,
    pub errored: usize,
}

/// One random expression against the reference interpreter.
pub fn check_expression<R: Rng>(rng: &mut R, outcomes: &mut Outcomes) -> Result<(), String> {
    let size = rng.gen_range(5..60);
    let g = random_graph(rng, size);
    let scope = random_scope(rng, &g);
    let ast = gen_bool(rng, 4);
    let source = render(&ast);
    let p = compile_query(&Query::new(QueryMode::Expression, &source)).map_err(|e| format!("{source}: {e}"))?;
    let got = evaluate(&p, &g, &scope);
    let mut expected = BTreeSet::new();
    let mut errors = 0;
    for t in &scope {
        match interpret(&ast, &g.entities[t]) {
            Ok(Val::B(true)) => {
                expected.insert(t.clone());
            }
            Ok(_) => {}
            Err(()) => errors += 1,
        }
    }
    if got.matches != expected || got.error_count != errors {
        return Err(format!("{source}: {} matches / {} errors, expected {} / {errors}", got.matches.len(), got.error_count, expected.len()));
    }
    outcomes.matched += usize::from(!expected.is_empty());
    outcomes.missed += usize::from(expected.len() + errors < scope.len());
    outcomes.errored += usize::from(errors > 0);
    Ok(())
}

/// One random regex against a backtracking matcher.
pub fn check_regex<R: Rng>(rng: &mut R) -> Result<(), String> {
    let size = rng.gen_range(5..60);
    let g = random_graph(rng, size);
    let scope = random_scope(rng, &g);
    let re = MiniRegex::generate(rng);
    let p = compile_query(&Query::new(QueryMode::Regex, re.source())).map_err(|e| format!("{}: {e}", re.source()))?;
    let got = evaluate(&p, &g, &scope).matches;
    let expected: BTreeSet<Token> = scope.iter().filter(|t| re.is_match(&g.entities[*t].name)).cloned().collect();
    if got != expected {
        return Err(format!("/{}/ matched {} names, expected {}", re.source(), got.len(), expected.len()));
    }
    Ok(())
}

/// One random substring search against lowercase containment.
pub fn check_full_text<R: Rng>(rng: &mut R) -> Result<(), String> {
    let size = rng.gen_range(5..60);
    let g = random_graph(rng, size);
    let scope = random_scope(rng, &g);
    let chars: Vec<char> = random_name(rng).chars().collect();
    let a = rng.gen_range(0..chars.len());
    let b = rng.gen_range(a + 1..=chars.len());
    let mut needle: String = chars[a..b].iter().collect();
    if rng.gen_bool(0.5) {
        needle = needle.to_uppercase();
    }
    let p = compile_query(&Query::new(QueryMode::FullText, &needle)).map_err(|e| e.to_string())?;
    let got = evaluate(&p, &g, &scope).matches;
    let expected: BTreeSet<Token> = scope
        .iter()
        .filter(|t| g.entities[*t].name.to_lowercase().contains(&needle.to_lowercase()))
        .cloned()
        .collect();
    if got != expected {
        return Err(format!("{needle:?} matched {} names, expected {}", got.len(), expected.len()));
    }
    Ok(())
}

/// Isolating random matches leaves exactly their visible ancestor closure.
pub fn check_isolate<R: Rng>(rng: &mut R, n: usize) -> Result<(), String> {
    let g = random_graph(rng, n);
    let vs = full_view(&g, []);
    let visible: Vec<Token> = vs.visible().iter().cloned().collect();
    let k = rng.gen_range(0..4.min(visible.len()) + 1);
    let matches: BTreeSet<Token> = visible.choose_multiple(rng, k).cloned().collect();
    let next = apply(&matches, MatchAction::Isolate, &vs);
    if next.visible() != &ancestor_closure(&matches, vs.visible()) {
        return Err(format!("isolating {matches:?} kept {} nodes", next.visible().len()));
    }
    if !vs.removed.iter().all(|t| next.removed.contains(t)) {
        return Err("isolate restored a removed node".into());
    }
    Ok(())
}

/// The default view shows solutions and projects, nothing else.
pub fn check_default_view<R: Rng>(rng: &mut R, n: usize) -> Result<(), String> {
    let g = random_graph(rng, n);
    let vs = default_view(&g);
    let expected: BTreeSet<Token> = g
        .entities
        .values()
        .filter(|e| e.kind == EntityKind::Solution || (e.kind == EntityKind::Project && e.token.depth() == 2))
        .map(|e| e.token.clone())
        .collect();
    if vs.visible() != &expected {
        return Err(format!("default view shows {} nodes, expected {}", vs.visible().len(), expected.len()));
    }
    Ok(())
}

fn severity_sets() -> Vec<Vec<Severity>> {
    let all = [Severity::Hint, Severity::Warning, Severity::Error];
    (0..8u8)
        .map(|mask| (0..3).filter(|b| mask & (1 << b) != 0).map(|b| all[b]).collect())
        .collect()
}

fn glyph_case(e: &Entity, cfg: &GlyphConfig) -> Result<(), String> {
    let spec = glyph_for(e, cfg);
    let label = format!("{} {:?} static={} access={:?}", e.kind, e.type_kind, e.is_static, e.accessibility);
    let fail = |what: &str| Err(format!("{label}: {what}"));
    if spec != glyph_for(e, cfg) {
        return fail("not pure");
    }
    if (spec.inner_outline.style == LineStyle::Dashed) != e.is_static {
        return fail("inner outline style does not follow isStatic");
    }
    let (instance, stat) = if e.kind == EntityKind::Type {
        (e.instance_member_count, e.static_member_count)
    } else {
        (0, 0)
    };
    if (spec.middle_outline.width == 0.0) != (instance == 0) || spec.middle_outline.style != LineStyle::Solid {
        return fail("middle outline");
    }
    if (spec.outer_outline.width == 0.0) != (stat == 0) || spec.outer_outline.style != LineStyle::Dashed {
        return fail("outer outline");
    }
    let saturations = [spec.inner_outline.saturation, spec.middle_outline.saturation, spec.outer_outline.saturation];
    if !(saturations[0] > saturations[1] && saturations[1] > saturations[2]) {
        return fail("saturation does not fall outward");
    }
    let error = e.diagnostics.iter().any(|d| d.severity == Severity::Error);
    let warning = e.diagnostics.iter().any(|d| d.severity == Severity::Warning);
    let effect = if error {
        Effect::Fire
    } else if warning {
        Effect::Smoke
    } else {
        Effect::None
    };
    if spec.effect != effect {
        return fail("effect precedence");
    }
    if let Some(access) = e.accessibility {
        if (access == Accessibility::Public) != spec.corner_icon_id.is_none() {
            return fail("corner icon does not track Public");
        }
    }
    if !(spec.radius.is_finite() && spec.radius > 0.0) {
        return fail("radius");
    }
    if e.kind.is_member() && spec.radius >= cfg.base(EntityKind::Type) {
        return fail("member not smaller than every type");
    }
    Ok(())
}

/// Every combination of kind, type kind, accessibility, staticness,
/// diagnostic severities and member counts under every scaling mode.
/// Returns the number of glyphs checked.
pub fn check_glyph_table() -> Result<usize, String> {
    let mut checked = 0;
    let counts = [(0, 0), (3, 0), (0, 7), (12, 40), (500, 0)];
    for scaling in [ScalingMode::Linear, ScalingMode::Logarithmic, ScalingMode::SquareRoot] {
        let cfg = GlyphConfig { scaling, ..GlyphConfig::default() };
        for kind in EntityKind::ALL {
            let type_kinds: Vec<Option<TypeKind>> =
                if kind == EntityKind::Type { TypeKind::ALL.into_iter().map(Some).collect() } else { vec![None] };
            let access: Vec<Option<Accessibility>> = if kind == EntityKind::Type || kind.is_member() {
                Accessibility::ALL.into_iter().map(Some).collect()
            } else {
                vec![None]
            };
            for &tk in &type_kinds {
                for &acc in &access {
                    for is_static in [false, true] {
                        for severities in severity_sets() {
                            for &(instance, stat) in &counts {
                                let mut e = Entity::new(Token::root(0), kind, "X");
                                e.type_kind = tk;
                                e.accessibility = acc;
                                e.is_static = is_static;
                                if kind == EntityKind::Type {
                                    e.instance_member_count = instance;
                                    e.static_member_count = stat;
                                }
                                e.diagnostics = severities
                                    .iter()
                                    .map(|&severity| Diagnostic {
                                        severity,
                                        code: "C1".into(),
                                        message: String::new(),
                                        location: None,
                                    })
                                    .collect();
                                glyph_case(&e, &cfg)?;
                                checked += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(checked)
}

/// Three hand-drawn reference glyphs: a static class with only static
/// members, a private class with a few instance members, and a method with
/// a warning next to a class with an error.
pub fn check_reference_glyphs() -> Result<(), String> {
    let cfg = GlyphConfig::default();
    let mut utility = Entity::new(Token::root(0), EntityKind::Type, "Utility");
    utility.type_kind = Some(TypeKind::Class);
    utility.accessibility = Some(Accessibility::Public);
    utility.is_static = true;
    utility.static_member_count = 6;
    let spec = glyph_for(&utility, &cfg);
    if !(spec.inner_outline.style == LineStyle::Dashed
        && spec.middle_outline.width == 0.0
        && spec.outer_outline.width > 0.0
        && spec.corner_icon_id.is_none())
    {
        return Err(format!("static class: {spec:?}"));
    }

    let mut hidden = Entity::new(Token::root(0), EntityKind::Type, "Hidden");
    hidden.type_kind = Some(TypeKind::Class);
    hidden.accessibility = Some(Accessibility::Private);
    hidden.instance_member_count = 3;
    let spec = glyph_for(&hidden, &cfg);
    if !(spec.inner_outline.style == LineStyle::Solid
        && spec.middle_outline.width > 0.0
        && spec.outer_outline.width == 0.0
        && spec.corner_icon_id.as_deref() == Some("access-private"))
    {
        return Err(format!("private class: {spec:?}"));
    }

    let diag = |severity| Diagnostic { severity, code: "W1".into(), message: String::new(), location: None };
    let mut warned = Entity::new(Token::root(0), EntityKind::Method, "run");
    warned.accessibility = Some(Accessibility::Public);
    warned.diagnostics = vec![diag(Severity::Warning)];
    if glyph_for(&warned, &cfg).effect != Effect::Smoke {
        return Err("method with a warning does not smoke".into());
    }
    let mut broken = hidden.clone();
    broken.diagnostics = vec![diag(Severity::Warning), diag(Severity::Error)];
    if glyph_for(&broken, &cfg).effect != Effect::Fire {
        return Err("class with an error is not on fire".into());
    }
    Ok(())
}
