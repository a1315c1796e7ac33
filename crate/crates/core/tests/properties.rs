mod support;

#[test]
fn copy_enumeration_matches_full_scan() {
    support::copy_completeness(256).unwrap();
}

#[test]
fn canonical_relations_are_monotone() {
    support::e_i_monotonicity(256).unwrap();
}

#[test]
fn le_fin_is_transitive() {
    support::le_fin_transitivity(256).unwrap();
}

#[test]
fn canonizations_reverify() {
    support::canonization_soundness(128).unwrap();
}
