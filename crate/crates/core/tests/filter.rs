mod common;

use std::collections::BTreeSet;

use codecarta_core::filter::{apply, compile_query, evaluate, MatchAction, Query, QueryMode};
use codecarta_core::view::{default_view, full_view};
use codecarta_core::{EntityGraph, Token};
use common::props::{self, Outcomes};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_scope<R: Rng>(rng: &mut R, g: &EntityGraph) -> BTreeSet<Token> {
    let keep = rng.gen_range(0.2..1.0);
    g.entities.keys().filter(|_| rng.gen_bool(keep)).cloned().collect()
}

#[test]
fn expressions_agree_with_the_reference_interpreter() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut outcomes = Outcomes::default();
    for round in 0..300 {
        props::check_expression(&mut rng, &mut outcomes).unwrap_or_else(|e| panic!("round {round}: {e}"));
    }
    // the generator exercises every outcome
    assert!(outcomes.matched > 50 && outcomes.missed > 50 && outcomes.errored > 5, "{outcomes:?}");
}

#[test]
fn regex_mode_agrees_with_a_backtracking_matcher() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..300 {
        props::check_regex(&mut rng).unwrap();
    }
}

#[test]
fn full_text_agrees_with_lowercase_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        props::check_full_text(&mut rng).unwrap();
    }
}

#[test]
fn trivial_predicates() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = common::random_graph(&mut rng, 80);
    let scope = random_scope(&mut rng, &g);
    let t = compile_query(&Query::new(QueryMode::Expression, "true")).unwrap();
    let f = compile_query(&Query::new(QueryMode::Expression, "false")).unwrap();
    assert_eq!(evaluate(&t, &g, &scope).matches, scope);
    assert!(evaluate(&f, &g, &scope).matches.is_empty());
}

#[test]
fn isolate_keeps_matches_and_their_ancestors() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        props::check_isolate(&mut rng, 100).unwrap();
    }
}

#[test]
fn isolate_of_three_deep_members_in_a_hundred_node_view() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let g = common::random_graph(&mut rng, 100);
    let vs = full_view(&g, []);
    let mut deep: Vec<&Token> = vs.visible().iter().collect();
    deep.sort_by_key(|t| std::cmp::Reverse(t.depth()));
    let matches: BTreeSet<Token> = deep.iter().take(3).map(|t| (*t).clone()).collect();
    let next = apply(&matches, MatchAction::Isolate, &vs);
    let mut expected = matches.clone();
    for m in &matches {
        expected.extend(m.ancestors());
    }
    assert_eq!(next.visible(), &expected);
}

#[test]
fn isolate_everything_and_highlight_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let g = common::random_graph(&mut rng, 60);
    let vs = full_view(&g, []);
    assert_eq!(apply(vs.visible(), MatchAction::Isolate, &vs), vs);
    let lit = apply(&BTreeSet::new(), MatchAction::Highlight, &vs);
    assert!(lit.highlighted.is_empty());
    assert_eq!(lit.visible(), vs.visible());
    assert!(lit.removed.is_empty());
}

#[test]
fn highlight_never_changes_visibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let g = common::random_graph(&mut rng, 60);
        let vs = default_view(&g);
        let matches = random_scope(&mut rng, &g);
        let next = apply(&matches, MatchAction::Highlight, &vs);
        assert_eq!(next.visible(), vs.visible());
        assert!(next.highlighted.is_subset(vs.visible()));
    }
}
