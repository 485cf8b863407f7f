//! Grammar–lexicon interface: template selection by interface filters,
//! coanchors, lexical equations and morphological features.

use std::collections::{BTreeMap, BTreeSet};

use log::debug;
use serde::Serialize;
use thiserror::Error;

use crate::dsl::{LemmaEntryDecl, Mark, MorphEntryDecl};
use crate::featstruct::{resolve, unify_in_place, BindingEnv, VarId};
use crate::treesolver::TreeTemplate;

#[derive(Debug, Clone, Error, PartialEq, Eq, Serialize)]
pub enum AnchorError {
    #[error("unknown form `{surface}`")]
    UnknownForm { surface: String },
    #[error("lemma `{lemma}`: template {template} has no node named `{node}`")]
    CoanchorNodeMissing { lemma: String, template: String, node: String },
    #[error("coanchor node `{node}` has category {got}, the lexicon expects {expected}")]
    CoanchorCatMismatch { node: String, expected: String, got: String },
    #[error("lemma `{lemma}`: template {template} has no node named `{node}` for an equation")]
    EquationNodeMissing { lemma: String, template: String, node: String },
    #[error("morph entry ({morph}, {lemma}, {cat}) is defined twice")]
    DuplicateMorph { morph: String, lemma: String, cat: String },
    #[error("lemma class `{name}` is defined twice")]
    DuplicateLemma { name: String },
}

/// Lemma entries plus an index of inflected forms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct Lexicon {
    pub lemmas: Vec<LemmaEntryDecl>,
    pub morphs: BTreeMap<String, Vec<MorphEntryDecl>>,
}

impl Lexicon {
    pub fn new(lemmas: Vec<LemmaEntryDecl>, morphs: Vec<MorphEntryDecl>) -> Result<Self, AnchorError> {
        let mut names = BTreeSet::new();
        for l in &lemmas {
            if !names.insert(&l.name) {
                return Err(AnchorError::DuplicateLemma { name: l.name.clone() });
            }
        }
        let mut seen = BTreeSet::new();
        let mut index: BTreeMap<String, Vec<MorphEntryDecl>> = BTreeMap::new();
        for m in morphs {
            if !seen.insert((m.morph.clone(), m.lemma.clone(), m.cat.clone())) {
                return Err(AnchorError::DuplicateMorph {
                    morph: m.morph,
                    lemma: m.lemma,
                    cat: m.cat.to_string(),
                });
            }
            index.entry(m.morph.clone()).or_default().push(m);
        }
        Ok(Lexicon { lemmas, morphs: index })
    }

    pub fn morphs_of(&self, surface: &str) -> &[MorphEntryDecl] {
        self.morphs.get(surface).map_or(&[], Vec::as_slice)
    }

    pub fn mwe_count(&self) -> usize {
        self.lemmas.iter().filter(|l| l.is_mwe()).count()
    }

    /// Family names referenced by lemmas, sorted and unique.
    pub fn families(&self) -> BTreeSet<&str> {
        self.lemmas.iter().map(|l| l.fam.as_str()).collect()
    }
}

/// A template with its anchor and coanchor leaves filled in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnchoredTree {
    /// `entry` for plain lemmas; anchor and coanchor words in tree order,
    /// joined by `-`, for MWEs (e.g. `prendre-la-porte`).
    pub lemma_id: String,
    pub lemma: String,
    pub template: String,
    pub is_mwe: bool,
    pub tree: TreeTemplate,
    #[serde(skip)]
    pub env: BindingEnv,
}

impl AnchoredTree {
    pub fn shape(&self) -> String {
        self.tree.shape()
    }

    /// Number of nodes carrying a word.
    pub fn lexical_leaves(&self) -> usize {
        self.tree.nodes.iter().filter(|n| n.lex.is_some()).count()
    }
}

/// Outcome of anchoring: surviving trees plus non-fatal diagnostics.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Anchoring {
    pub trees: Vec<AnchoredTree>,
    pub diagnostics: Vec<AnchorError>,
}

/// Anchors `lemma` in each of `templates`.
pub fn anchor_lemma(lemma: &LemmaEntryDecl, templates: &[TreeTemplate]) -> Anchoring {
    let mut out = Anchoring::default();
    for t in templates {
        match anchor_one(lemma, t) {
            Ok(Some(a)) => out.trees.push(a),
            Ok(None) => {}
            Err(e) => out.diagnostics.push(e),
        }
    }
    out
}

fn anchor_one(lemma: &LemmaEntryDecl, t: &TreeTemplate) -> Result<Option<AnchoredTree>, AnchorError> {
    let mut env = BindingEnv::new();
    if let Some(m) = t.max_var() {
        env.register(VarId(m));
    }
    let mut tree = t.clone();
    match unify_in_place(&tree.iface, &lemma.filters, &mut env) {
        Ok(fs) => tree.iface = fs,
        Err(e) => {
            debug!("{}: filters reject {}: {e}", lemma.name, t.id);
            return Ok(None);
        }
    }
    let mut consumed = BTreeSet::new();
    for c in &lemma.coanchors {
        let idx = tree
            .node_named(&c.node)
            .filter(|&i| tree.nodes[i].mark == Mark::Coanchor && !consumed.contains(&i))
            .ok_or_else(|| AnchorError::CoanchorNodeMissing {
                lemma: lemma.name.clone(),
                template: t.id.clone(),
                node: c.node.clone(),
            })?;
        let node = &mut tree.nodes[idx];
        if node.cat != c.cat {
            return Err(AnchorError::CoanchorCatMismatch {
                node: c.node.clone(),
                expected: c.cat.to_string(),
                got: node.cat.to_string(),
            });
        }
        node.lex = Some(c.form.clone());
        consumed.insert(idx);
    }
    let open: Vec<usize> = (0..tree.nodes.len())
        .filter(|&i| tree.nodes[i].mark == Mark::Coanchor && !consumed.contains(&i))
        .collect();
    if !open.is_empty() {
        debug!("{}: {} keeps {} coanchor node(s) unfilled", lemma.name, t.id, open.len());
        return Ok(None);
    }
    for eq in &lemma.equations {
        let idx = tree.node_named(&eq.node).ok_or_else(|| AnchorError::EquationNodeMissing {
            lemma: lemma.name.clone(),
            template: t.id.clone(),
            node: eq.node.clone(),
        })?;
        match unify_in_place(&tree.nodes[idx].top, &eq.features, &mut env) {
            Ok(fs) => tree.nodes[idx].top = fs,
            Err(e) => {
                debug!("{}: equation on {} clashes in {}: {e}", lemma.name, eq.node, t.id);
                return Ok(None);
            }
        }
    }
    let Some(a) = tree.anchor() else {
        return Ok(None);
    };
    if tree.nodes[a].cat != lemma.cat {
        debug!("{}: anchor of {} is not a {}", lemma.name, t.id, lemma.cat);
        return Ok(None);
    }
    tree.nodes[a].lex = Some(lemma.entry.clone());
    let words: Vec<&str> = tree.nodes.iter().filter_map(|n| n.lex.as_deref()).collect();
    let lemma_id = if lemma.is_mwe() {
        words.join("-")
    } else {
        lemma.entry.clone()
    };
    resolve_tree(&mut tree, &env);
    Ok(Some(AnchoredTree {
        lemma_id,
        lemma: lemma.name.clone(),
        template: t.id.clone(),
        is_mwe: lemma.is_mwe(),
        tree,
        env,
    }))
}

fn resolve_tree(tree: &mut TreeTemplate, env: &BindingEnv) {
    for n in &mut tree.nodes {
        n.top = resolve(&n.top, env);
        n.bot = resolve(&n.bot, env);
    }
    tree.iface = resolve(&tree.iface, env);
}

/// Anchors every reading of `surface`. Unknown forms give no trees and an
/// `UnknownForm` diagnostic.
pub fn anchor_token(
    surface: &str,
    lexicon: &Lexicon,
    families: &BTreeMap<String, Vec<TreeTemplate>>,
) -> Anchoring {
    let morphs = lexicon.morphs_of(surface);
    let mut out = Anchoring::default();
    if morphs.is_empty() {
        out.diagnostics.push(AnchorError::UnknownForm {
            surface: surface.to_string(),
        });
        return out;
    }
    for m in morphs {
        for lemma in lexicon.lemmas.iter().filter(|l| l.entry == m.lemma && l.cat == m.cat) {
            let templates = families.get(&lemma.fam).map_or(&[][..], Vec::as_slice);
            let anchored = anchor_lemma(lemma, templates);
            out.diagnostics.extend(anchored.diagnostics);
            for mut a in anchored.trees {
                let idx = a.tree.anchor().expect("anchored trees have an anchor");
                match unify_in_place(&a.tree.nodes[idx].top, &m.feats, &mut a.env) {
                    Ok(fs) => a.tree.nodes[idx].top = fs,
                    Err(e) => {
                        debug!("{surface}: morph features clash in {}: {e}", a.template);
                        continue;
                    }
                }
                a.tree.nodes[idx].lex = Some(surface.to_string());
                let env = a.env.clone();
                resolve_tree(&mut a.tree, &env);
                out.trees.push(a);
            }
        }
    }
    out
}
