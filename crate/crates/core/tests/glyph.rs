mod common;

use common::props;

#[test]
fn every_glyph_combination_keeps_the_invariants() {
    let checked = props::check_glyph_table().unwrap();
    assert!(checked > 10_000, "{checked}");
}

#[test]
fn reference_glyphs() {
    props::check_reference_glyphs().unwrap();
}
