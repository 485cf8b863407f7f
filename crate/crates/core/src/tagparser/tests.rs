use std::path::PathBuf;

use super::*;
use crate::cli::{CompiledGrammar, Project, ProjectManifest};

fn toy() -> CompiledGrammar {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("assets");
    let read = |p: &str| (PathBuf::from(p), std::fs::read_to_string(dir.join(p)).unwrap());
    let manifest = ProjectManifest::from_toml("grammar = []", &dir).unwrap();
    let project = Project::from_sources(manifest, &[read("grammar/toy.mg")], &[read("lexicon/toy.lex")]).unwrap();
    CompiledGrammar::compile(&project).unwrap()
}

fn derived(g: &CompiledGrammar, s: &str) -> Vec<String> {
    g.parse_sentence(s).report.derivations.into_iter().map(|d| d.derived).collect()
}

#[test]
fn intransitive_clause() {
    let g = toy();
    let r = g.parse_sentence("Jean dort").report;
    assert_eq!(r.derivations.len(), 1);
    let d = &r.derivations[0];
    assert_eq!(d.derived, "(S (N Jean) (VN (V dort)))");
    assert_eq!(d.derivation, "dormir:Intransitive#0@2(1:sub Jean:ProperNoun#0@1)");
    assert!(r.literal_only && !r.idiomatic && !r.truncated);
}

#[test]
fn agreement_filters() {
    let g = toy();
    assert!(derived(&g, "elles dort").is_empty());
    assert!(derived(&g, "Jean voient elles").is_empty());
    assert_eq!(derived(&g, "elles voient Jean"), vec!["(S (N elles) (VN (V voient)) (N Jean))"]);
}

#[test]
fn adjunction_sites() {
    let g = toy();
    let mut got = derived(&g, "Jean dort souvent");
    got.sort();
    assert_eq!(
        got,
        vec![
            "(S (N Jean) (VN (VN (V dort)) (ADV souvent)))",
            "(S (S (N Jean) (VN (V dort))) (ADV souvent))",
        ]
    );
    let nested = derived(&g, "Jean dort tres souvent");
    assert_eq!(nested.len(), 2);
    assert!(nested.contains(&"(S (N Jean) (VN (VN (V dort)) (ADV (ADV tres) (ADV souvent))))".to_string()));
}

#[test]
fn stacked_adjunction() {
    let g = toy();
    // VN and S sites, each taking one or both adverbs in either stacking
    let ds = derived(&g, "Jean dort souvent souvent");
    assert!(ds.len() >= 3, "{ds:?}");
    for d in &ds {
        assert_eq!(yield_of(d), ["Jean", "dort", "souvent", "souvent"]);
    }
}

#[test]
fn single_token_with_other_start() {
    let g = toy();
    let n = Atom::new("n").unwrap();
    let r = g.parse_sentence_as("Jean", &n).report;
    assert_eq!(r.derivations.len(), 1);
    assert_eq!(r.derivations[0].derived, "(N Jean)");
    assert!(g.parse_sentence("Jean").report.derivations.is_empty());
}

#[test]
fn unknown_word_is_a_gap() {
    let g = toy();
    let r = g.parse_sentence("Jean ronfle");
    assert!(r.report.derivations.is_empty());
    assert_eq!(r.diagnostics.len(), 1);
}

#[test]
fn removing_trees_never_adds_derivations() {
    let g = toy();
    let toks = ["Jean", "dort", "tres", "souvent"];
    let (trees, _) = g.anchor_tokens(&toks);
    let s = Atom::new("s").unwrap();
    let full: BTreeSet<String> = parse(&toks, &trees, &s).derivations.into_iter().map(|d| d.derivation).collect();
    for p in 0..trees.len() {
        for k in 0..trees[p].len() {
            let mut fewer = trees.clone();
            fewer[p].remove(k);
            for d in parse(&toks, &fewer, &s).derivations {
                assert!(full.contains(&d.derivation));
            }
        }
    }
}

#[test]
fn derivation_cap_truncates() {
    let g = toy();
    let toks = ["Jean", "dort", "souvent", "souvent"];
    let (trees, _) = g.anchor_tokens(&toks);
    let s = Atom::new("s").unwrap();
    let all = parse(&toks, &trees, &s);
    let capped = parse_with_cap(&toks, &trees, &s, 1);
    assert!(capped.truncated && !all.truncated);
    assert_eq!(capped.derivations, all.derivations[..1]);
}

#[test]
fn empty_input() {
    let r = parse::<&str>(&[], &[], &Atom::new("s").unwrap());
    assert!(r.derivations.is_empty() && !r.literal_only && !r.idiomatic);
}

#[test]
fn yields() {
    assert_eq!(yield_of("(S (N Jean) (VN (V dort)))"), ["Jean", "dort"]);
    assert_eq!(yield_of("(N (D la) (N porte))"), ["la", "porte"]);
    assert!(yield_of("(S (N) (V))").is_empty());
}
