mod common;

use std::collections::BTreeSet;

use common::parser_oracle::derivations;
use metagramme::featstruct::Atom;
use metagramme::tagparser::parse_with_cap;

#[test]
fn chart_matches_generate_and_test_on_short_sentences() {
    let g = common::toy();
    let words = ["Jean", "elles", "dort", "voient", "souvent", "tres"];
    let s = Atom::new("s").unwrap();
    let mut sentences: Vec<Vec<&str>> = vec![vec![]];
    let mut frontier: Vec<Vec<&str>> = vec![vec![]];
    for _ in 0..4 {
        frontier = frontier
            .iter()
            .flat_map(|p| words.iter().map(move |w| p.iter().copied().chain([*w]).collect()))
            .collect();
        sentences.extend(frontier.clone());
    }
    let mut parsed = 0;
    for toks in &sentences[1..] {
        let (trees, _) = g.anchor_tokens(toks);
        let r = parse_with_cap(toks, &trees, &s, 1 << 14);
        assert!(!r.truncated);
        let got: BTreeSet<(String, String)> = r.derivations.into_iter().map(|d| (d.derivation, d.derived)).collect();
        let want = derivations(toks, &trees, &s);
        assert_eq!(got, want, "{toks:?}");
        parsed += !got.is_empty() as usize;
    }
    assert!(parsed >= 8, "{parsed}");
}
