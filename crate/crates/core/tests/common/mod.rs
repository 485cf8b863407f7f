#![allow(dead_code)]

pub mod fs_laws;
pub mod golden;
pub mod parser_oracle;
pub mod solver_oracle;

use std::path::PathBuf;

use metagramme::cli::{CompiledGrammar, Project, ProjectManifest};
use metagramme::dsl::{parse_lexicon, pretty_lexicon};
use metagramme::minigrammar::EXTRA_LEXICON;

pub fn assets() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("assets")
}

pub fn toy_project() -> Project {
    Project::load(&assets().join("projects/toy.toml")).expect("toy project loads")
}

pub fn toy() -> CompiledGrammar {
    CompiledGrammar::compile(&toy_project()).expect("toy grammar compiles")
}

/// The entries of `mwe-extra.lex`, one source text each.
pub fn extra_entries() -> Vec<String> {
    let (lemmas, morphs) = parse_lexicon(EXTRA_LEXICON.1).unwrap();
    assert!(morphs.is_empty());
    lemmas.iter().map(|l| pretty_lexicon(std::slice::from_ref(l), &[])).collect()
}

/// The MWE project with the first `n` extra entries added.
pub fn mwe_with_extra(n: usize) -> Project {
    let read = |p: &str| (PathBuf::from(p), std::fs::read_to_string(assets().join(p)).unwrap());
    let grammar = [read("grammar/frenchtag.mg"), read("grammar/mwe.mg")];
    let mut lexicon = vec![read("lexicon/base.lex"), read("lexicon/mwe.lex"), read("lexicon/forms.morph")];
    for (i, text) in extra_entries().into_iter().take(n).enumerate() {
        lexicon.push((PathBuf::from(format!("extra-{i}.lex")), text));
    }
    let manifest = ProjectManifest::from_toml("grammar = []", &assets()).unwrap();
    Project::from_sources(manifest, &grammar, &lexicon).unwrap()
}
