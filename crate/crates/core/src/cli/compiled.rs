use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::manifest::{Caps, Project};
use super::ProjectError;
use crate::anchoring::{anchor_token, AnchorError, AnchoredTree, Anchoring, Lexicon};
use crate::featstruct::Atom;
use crate::resolver::build_family_table;
use crate::tagparser::{parse_with_cap, ParseReport};
use crate::treesolver::{compile_family_with, ModelStatistics, SolverCaps, TreeTemplate};

/// Templates per family together with the lexicon that anchors them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompiledGrammar {
    pub start_cat: Atom,
    pub caps: Caps,
    pub class_count: usize,
    pub families: BTreeMap<String, Vec<TreeTemplate>>,
    pub lexicon: Lexicon,
    pub stats: ModelStatistics,
}

/// A parse plus the anchoring diagnostics met on the way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SentenceResult {
    pub report: ParseReport,
    pub diagnostics: Vec<AnchorError>,
}

impl CompiledGrammar {
    pub fn compile(project: &Project) -> Result<Self, ProjectError> {
        let caps = project.manifest.caps;
        let mut names: BTreeSet<&str> = project.lexicon.families();
        names.extend(project.manifest.families.iter().map(String::as_str));
        let table = build_family_table(&project.grammar, names.iter().copied())?;
        let solver = SolverCaps { max_variables: caps.nodes, max_descriptions: caps.descriptions };
        let mut families = BTreeMap::new();
        let mut stats = ModelStatistics::default();
        for family in table.families.keys() {
            let (ts, st) = compile_family_with(family, &project.grammar, solver)
                .map_err(|error| ProjectError::Solve { family: family.clone(), error })?;
            stats.absorb(&st);
            families.insert(family.clone(), ts);
        }
        Ok(CompiledGrammar {
            start_cat: project.manifest.start_cat.clone(),
            caps,
            class_count: project.class_count(),
            families,
            lexicon: project.lexicon.clone(),
            stats,
        })
    }

    pub fn template_count(&self) -> usize {
        self.families.values().map(Vec::len).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("compiled grammar serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ProjectError> {
        serde_json::from_str(text).map_err(|e| ProjectError::CompiledGrammar { message: e.to_string() })
    }

    pub fn anchor_word(&self, surface: &str) -> Anchoring {
        anchor_token(surface, &self.lexicon, &self.families)
    }

    /// Anchored trees per token, plus diagnostics in token order.
    pub fn anchor_tokens(&self, tokens: &[&str]) -> (Vec<Vec<AnchoredTree>>, Vec<AnchorError>) {
        let per: Vec<Anchoring> = tokens.par_iter().map(|t| self.anchor_word(t)).collect();
        let mut diags = Vec::new();
        let trees = per
            .into_iter()
            .map(|a| {
                diags.extend(a.diagnostics);
                a.trees
            })
            .collect();
        (trees, diags)
    }

    pub fn parse_sentence(&self, sentence: &str) -> SentenceResult {
        self.parse_sentence_as(sentence, &self.start_cat)
    }

    pub fn parse_sentence_as(&self, sentence: &str, start: &Atom) -> SentenceResult {
        let tokens: Vec<&str> = sentence.split_whitespace().collect();
        let (trees, diagnostics) = self.anchor_tokens(&tokens);
        let report = parse_with_cap(&tokens, &trees, start, self.caps.derivations);
        SentenceResult { report, diagnostics }
    }
}
