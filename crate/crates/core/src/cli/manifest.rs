use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ProjectError;
use crate::anchoring::Lexicon;
use crate::dsl::{parse_lexicon, parse_metagrammar};
use crate::featstruct::Atom;
use crate::resolver::{Grammar, DEFAULT_DESCRIPTION_CAP};
use crate::tagparser::DEFAULT_DERIVATION_CAP;
use crate::treesolver::DEFAULT_MAX_VARIABLES;

pub const CAPS_ENV: &str = "METAGRAMME_CAPS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Caps {
    pub descriptions: usize,
    pub derivations: usize,
    /// Node variables per description handed to the tree solver.
    pub nodes: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            descriptions: DEFAULT_DESCRIPTION_CAP,
            derivations: DEFAULT_DERIVATION_CAP,
            nodes: DEFAULT_MAX_VARIABLES,
        }
    }
}

impl Caps {
    /// Applies overrides written `descriptions=N,derivations=N,nodes=N`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self, ProjectError> {
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || ProjectError::Caps { spec: spec.to_string() };
            let (k, v) = part.split_once('=').ok_or_else(bad)?;
            let v: usize = v.trim().parse().map_err(|_| bad())?;
            match k.trim() {
                "descriptions" => self.descriptions = v,
                "derivations" => self.derivations = v,
                "nodes" => self.nodes = v,
                _ => return Err(bad()),
            }
        }
        Ok(self)
    }

    pub fn with_env(self) -> Result<Self, ProjectError> {
        match std::env::var(CAPS_ENV) {
            Ok(spec) => self.with_overrides(&spec),
            Err(_) => Ok(self),
        }
    }
}

fn default_start() -> Atom {
    Atom::new("s").unwrap()
}

/// A project file. Paths are relative to the manifest's directory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectManifest {
    #[serde(default = "default_start")]
    pub start_cat: Atom,
    pub grammar: Vec<PathBuf>,
    #[serde(default)]
    pub lexicon: Vec<PathBuf>,
    /// Families compiled in addition to those named by lemmas.
    #[serde(default)]
    pub families: Vec<String>,
    #[serde(default)]
    pub caps: Caps,
}

impl ProjectManifest {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ProjectError> {
        toml::from_str(text).map_err(|e| ProjectError::Manifest {
            path: path.to_path_buf(),
            message: e.message().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ProjectError> {
        let text = read(path)?;
        let mut m = Self::from_toml(&text, path)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        for p in m.grammar.iter_mut().chain(m.lexicon.iter_mut()) {
            *p = dir.join(&*p);
        }
        Ok(m)
    }
}

pub(crate) fn read(path: &Path) -> Result<String, ProjectError> {
    std::fs::read_to_string(path).map_err(|e| ProjectError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Parsed and linked sources of a project.
#[derive(Clone, Debug)]
pub struct Project {
    pub manifest: ProjectManifest,
    pub grammar: Grammar,
    pub lexicon: Lexicon,
}

impl Project {
    pub fn load(path: &Path) -> Result<Self, ProjectError> {
        let manifest = ProjectManifest::load(path)?;
        let grammar = manifest
            .grammar
            .iter()
            .map(|p| Ok((p.clone(), read(p)?)))
            .collect::<Result<Vec<_>, ProjectError>>()?;
        let lexicon = manifest
            .lexicon
            .iter()
            .map(|p| Ok((p.clone(), read(p)?)))
            .collect::<Result<Vec<_>, ProjectError>>()?;
        Self::from_sources(manifest, &grammar, &lexicon)
    }

    /// Builds a project from in-memory `(path, text)` sources; the paths only
    /// label diagnostics.
    pub fn from_sources(
        manifest: ProjectManifest,
        grammar: &[(PathBuf, String)],
        lexicon: &[(PathBuf, String)],
    ) -> Result<Self, ProjectError> {
        let mut classes = Vec::new();
        for (path, text) in grammar {
            let cs = parse_metagrammar(text).map_err(|error| ProjectError::Dsl { path: path.clone(), error })?;
            classes.extend(cs);
        }
        let grammar = Grammar::new(classes)?;
        let (mut lemmas, mut morphs) = (Vec::new(), Vec::new());
        for (path, text) in lexicon {
            let (l, m) = parse_lexicon(text).map_err(|error| ProjectError::Dsl { path: path.clone(), error })?;
            lemmas.extend(l);
            morphs.extend(m);
        }
        let lexicon = Lexicon::new(lemmas, morphs)?;
        Ok(Project { manifest, grammar, lexicon })
    }

    pub fn class_count(&self) -> usize {
        self.grammar.len()
    }

    pub fn mwe_lemma_count(&self) -> usize {
        self.lexicon.mwe_count()
    }
}
