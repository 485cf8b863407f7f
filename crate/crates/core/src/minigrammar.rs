//! The bundled mini grammar: a FrenchTAG-style metagrammar with an MWE layer,
//! its lexicon and a regression corpus of simplified development and test
//! sentences.
//!
//! Sources are compiled into the library, so [`load_assets`] needs no files
//! on disk. [`assets_dir`] points at the same files for the CLI.

use std::path::PathBuf;

use crate::anchoring::Lexicon;
use crate::cli::{parse_corpus, CompiledGrammar, CorpusEntry, Project, ProjectError, ProjectManifest};
use crate::resolver::Grammar;

macro_rules! asset {
    ($p:literal) => {
        ($p, include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/assets/", $p)))
    };
}

pub const BASE_GRAMMAR: [(&str, &str); 1] = [asset!("grammar/frenchtag.mg")];
pub const MWE_GRAMMAR: (&str, &str) = asset!("grammar/mwe.mg");
pub const BASE_LEXICON: [(&str, &str); 2] = [asset!("lexicon/base.lex"), asset!("lexicon/forms.morph")];
pub const MWE_LEXICON: (&str, &str) = asset!("lexicon/mwe.lex");
pub const EXTRA_LEXICON: (&str, &str) = asset!("lexicon/mwe-extra.lex");
pub const CORPUS: (&str, &str) = asset!("corpus/corpus.tsv");
pub const SKIPPED: (&str, &str) = asset!("corpus/skipped.txt");

/// Project versions, from the plain grammar to the one with every MWE.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Version {
    Base,
    Mwe,
    MwePlus,
}

impl Version {
    pub fn manifest_name(self) -> &'static str {
        match self {
            Version::Base => "frenchtag.toml",
            Version::Mwe => "mwe.toml",
            Version::MwePlus => "mwe-plus.toml",
        }
    }

    fn sources(self) -> (Vec<(&'static str, &'static str)>, Vec<(&'static str, &'static str)>) {
        let mut grammar = BASE_GRAMMAR.to_vec();
        let mut lexicon = vec![BASE_LEXICON[0]];
        if self != Version::Base {
            grammar.push(MWE_GRAMMAR);
            lexicon.push(MWE_LEXICON);
        }
        if self == Version::MwePlus {
            lexicon.push(EXTRA_LEXICON);
        }
        lexicon.push(BASE_LEXICON[1]);
        (grammar, lexicon)
    }
}

/// Directory holding the asset files.
pub fn assets_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("assets")
}

fn owned(files: &[(&str, &str)]) -> Vec<(PathBuf, String)> {
    files.iter().map(|(p, t)| (PathBuf::from(p), t.to_string())).collect()
}

pub fn project(version: Version) -> Result<Project, ProjectError> {
    let (grammar, lexicon) = version.sources();
    let manifest = ProjectManifest::from_toml("grammar = []", &assets_dir().join("projects").join(version.manifest_name()))?;
    Project::from_sources(manifest, &owned(&grammar), &owned(&lexicon))
}

pub fn compiled(version: Version) -> Result<CompiledGrammar, ProjectError> {
    CompiledGrammar::compile(&project(version)?)
}

pub fn corpus() -> Result<Vec<CorpusEntry>, ProjectError> {
    parse_corpus(CORPUS.1)
}

/// Grammar, lexicon and corpus of the full MWE-aware project.
pub fn load_assets() -> Result<(Grammar, Lexicon, Vec<CorpusEntry>), ProjectError> {
    let p = project(Version::MwePlus)?;
    Ok((p.grammar, p.lexicon, corpus()?))
}

/// Skipped corpus sentences as `(id, reason)`.
pub fn skipped() -> Vec<(&'static str, &'static str)> {
    SKIPPED
        .1
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .filter_map(|l| l.split_once('\t'))
        .collect()
}
