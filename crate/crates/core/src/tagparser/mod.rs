//! Chart parsing with substitution and adjunction over anchored trees.
//!
//! Recognition is bottom-up over dotted items (see the `chart` module); derivations are
//! then read off the backpointers and each one is checked for feature
//! consistency with variables renamed apart per elementary tree.
//!
//! Derivation trees are written `lemma:template@pos(node:op child, ...)`
//! where `pos` is the 1-based token position of the anchor, `node` is the
//! preorder index of the attachment site, `op` is `sub` or `adj`, and
//! coanchors appear as `node:co@pos`.

mod chart;
mod derivation;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::anchoring::AnchoredTree;
use crate::featstruct::Atom;
use chart::Chart;
use derivation::{Assembled, Enumerator};

pub const DEFAULT_DERIVATION_CAP: usize = 512;

/// Partial derivations kept per chart item before feature checking.
const ENUMERATION_CAP: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MweSpan {
    pub lemma: String,
    pub positions: BTreeSet<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Derivation {
    pub derivation: String,
    pub derived: String,
    pub mwe_readings: Vec<String>,
    pub mwe_spans: Vec<MweSpan>,
}

impl Derivation {
    pub fn is_idiomatic(&self) -> bool {
        !self.mwe_readings.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseReport {
    pub sentence: String,
    pub derivations: Vec<Derivation>,
    pub idiomatic: bool,
    pub literal_only: bool,
    pub truncated: bool,
}

impl ParseReport {
    pub fn new(sentence: String, mut derivations: Vec<Derivation>, truncated: bool) -> Self {
        derivations.sort();
        derivations.dedup_by(|a, b| a.derivation == b.derivation);
        let idiomatic = derivations.iter().any(Derivation::is_idiomatic);
        ParseReport {
            sentence,
            literal_only: !derivations.is_empty() && !idiomatic,
            idiomatic,
            derivations,
            truncated,
        }
    }
}

/// Parses `tokens` given the anchored trees of each token.
pub fn parse<S: AsRef<str>>(tokens: &[S], anchored: &[Vec<AnchoredTree>], start: &Atom) -> ParseReport {
    parse_with_cap(tokens, anchored, start, DEFAULT_DERIVATION_CAP)
}

pub fn parse_with_cap<S: AsRef<str>>(
    tokens: &[S],
    anchored: &[Vec<AnchoredTree>],
    start: &Atom,
    cap: usize,
) -> ParseReport {
    assert_eq!(tokens.len(), anchored.len(), "one tree list per token");
    let words: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
    let sentence = words.join(" ");
    if words.is_empty() {
        return ParseReport::new(sentence, Vec::new(), false);
    }
    let chart = Chart::build(&words, anchored, start);
    let mut en = Enumerator::new(&chart, ENUMERATION_CAP.max(cap));
    let mut found = Vec::new();
    let mut seen = BTreeSet::new();
    for &g in &chart.goals {
        let root = chart.items[g].inst;
        for ops in en.ops(g).iter() {
            let a = Assembled::new(&chart, root, ops);
            if !a.features_ok() {
                continue;
            }
            let derivation = a.derivation();
            if !seen.insert(derivation.clone()) {
                continue;
            }
            let spans = a.mwe_spans();
            let mut readings: Vec<String> = spans.iter().map(|(l, _)| l.clone()).collect();
            readings.dedup();
            found.push(Derivation {
                derivation,
                derived: a.derived(),
                mwe_readings: readings,
                mwe_spans: spans.into_iter().map(|(lemma, positions)| MweSpan { lemma, positions }).collect(),
            });
        }
    }
    found.sort();
    let mut truncated = en.truncated;
    if found.len() > cap {
        found.truncate(cap);
        truncated = true;
    }
    ParseReport::new(sentence, found, truncated)
}

/// MWE readings found in the report, each with the 1-based token positions
/// of its anchor and coanchors.
pub fn detect_mwe(report: &ParseReport) -> Vec<(String, BTreeSet<usize>)> {
    let set: BTreeSet<(String, BTreeSet<usize>)> = report
        .derivations
        .iter()
        .flat_map(|d| d.mwe_spans.iter().map(|s| (s.lemma.clone(), s.positions.clone())))
        .collect();
    set.into_iter().collect()
}

/// Lexical leaves of a bracketed derived tree, left to right.
pub fn yield_of(derived: &str) -> Vec<String> {
    let spaced = derived.replace('(', " ( ").replace(')', " ) ");
    let mut out = Vec::new();
    let mut after_open = false;
    for tok in spaced.split_whitespace() {
        match tok {
            "(" => after_open = true,
            ")" => after_open = false,
            _ if after_open => after_open = false,
            w => out.push(w.to_string()),
        }
    }
    out
}

#[cfg(test)]
mod tests;
