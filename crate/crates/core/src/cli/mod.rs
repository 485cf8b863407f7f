//! Project manifests, compiled grammars, corpora, growth statistics and the
//! commands behind the `metagramme` binary.
//!
//! Commands return a [`CmdOutput`]: JSON lines for stdout, human-readable
//! diagnostics for stderr and an exit code (0 success, 1 input diagnostics,
//! 2 internal invariant violation).

mod compiled;
mod corpus;
mod manifest;
mod stats;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

pub use compiled::{CompiledGrammar, SentenceResult};
pub use corpus::{parse_corpus, CorpusEntry, Expectation};
pub use manifest::{Caps, Project, ProjectManifest, CAPS_ENV};
pub use stats::{percent_delta, Counts, GrowthStats};

use crate::anchoring::AnchorError;
use crate::dsl::DslError;
use crate::resolver::ResolveError;
use crate::tagparser::yield_of;
use crate::treesolver::SolveError;

#[derive(Debug, Error)]
pub enum ProjectError {
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{}: {message}", path.display())]
    Manifest { path: PathBuf, message: String },
    #[error("{}:{error}", path.display())]
    Dsl { path: PathBuf, error: DslError },
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error("family `{family}`: {error}")]
    Solve { family: String, error: SolveError },
    #[error(transparent)]
    Anchor(#[from] AnchorError),
    #[error("corpus line {line}: {message}")]
    Corpus { line: usize, message: String },
    #[error("bad caps `{spec}`, expected descriptions=N,derivations=N,nodes=N")]
    Caps { spec: String },
    #[error("compiled grammar: {message}")]
    CompiledGrammar { message: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CmdOutput {
    pub stdout: Vec<String>,
    pub stderr: Vec<String>,
    pub code: i32,
}

impl CmdOutput {
    fn failure(e: ProjectError) -> Self {
        CmdOutput { stdout: Vec::new(), stderr: vec![format!("error: {e}")], code: 1 }
    }

    fn raise(&mut self, code: i32) {
        self.code = self.code.max(code);
    }
}

/// Loads a project, applying `METAGRAMME_CAPS` on top of the manifest caps.
pub fn load_project(manifest: &Path) -> Result<Project, ProjectError> {
    let mut p = Project::load(manifest)?;
    p.manifest.caps = p.manifest.caps.with_env()?;
    Ok(p)
}

pub fn compile_manifest(manifest: &Path) -> Result<CompiledGrammar, ProjectError> {
    CompiledGrammar::compile(&load_project(manifest)?)
}

pub fn load_compiled(path: &Path) -> Result<CompiledGrammar, ProjectError> {
    let mut g = CompiledGrammar::from_json(&manifest::read(path)?)?;
    g.caps = g.caps.with_env()?;
    Ok(g)
}

/// `compile -m manifest [-o grammar.json]`: writes the compiled grammar (to
/// stdout without `-o`) and reports template counts and solver statistics.
pub fn cmd_compile(manifest: &Path, out: Option<&Path>) -> CmdOutput {
    let g = match compile_manifest(manifest) {
        Ok(g) => g,
        Err(e) => return CmdOutput::failure(e),
    };
    let mut res = CmdOutput::default();
    let counts: serde_json::Map<String, serde_json::Value> =
        g.families.iter().map(|(f, ts)| (f.clone(), json!(ts.len()))).collect();
    let summary = json!({
        "classes": g.class_count,
        "templates": g.template_count(),
        "families": counts,
        "statistics": g.stats,
    });
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, g.to_json() + "\n") {
                return CmdOutput::failure(ProjectError::Io { path: path.to_path_buf(), message: e.to_string() });
            }
        }
        None => res.stdout.push(serde_json::to_string(&g).expect("serializable")),
    }
    res.stdout.push(summary.to_string());
    res
}

/// Where `parse` and `anchor` get their grammar from.
#[derive(Clone, Debug)]
pub enum GrammarSource {
    Compiled(PathBuf),
    Manifest(PathBuf),
}

impl GrammarSource {
    pub fn load(&self) -> Result<CompiledGrammar, ProjectError> {
        match self {
            GrammarSource::Compiled(p) => load_compiled(p),
            GrammarSource::Manifest(p) => compile_manifest(p),
        }
    }
}

#[derive(Clone, Debug)]
pub enum ParseInput {
    Sentence(String),
    Corpus(PathBuf),
}

fn report_diagnostics(out: &mut CmdOutput, sentence: &str, r: &SentenceResult) {
    for d in &r.diagnostics {
        out.stderr.push(format!("{sentence}: {d}"));
        out.raise(1);
    }
    let tokens: Vec<&str> = sentence.split_whitespace().collect();
    for d in &r.report.derivations {
        if yield_of(&d.derived) != tokens {
            out.stderr.push(format!("internal: yield of {} differs from `{sentence}`", d.derived));
            out.raise(2);
        }
    }
}

/// `parse (-g grammar.json | -m manifest) (-s sentence | -c corpus.tsv)`.
pub fn cmd_parse(source: &GrammarSource, input: &ParseInput) -> CmdOutput {
    let g = match source.load() {
        Ok(g) => g,
        Err(e) => return CmdOutput::failure(e),
    };
    let mut out = CmdOutput::default();
    match input {
        ParseInput::Sentence(s) => {
            let r = g.parse_sentence(s);
            report_diagnostics(&mut out, s, &r);
            out.stdout.push(serde_json::to_string(&r.report).expect("serializable"));
        }
        ParseInput::Corpus(path) => {
            let entries = match manifest::read(path).and_then(|t| parse_corpus(&t)) {
                Ok(e) => e,
                Err(e) => return CmdOutput::failure(e),
            };
            let results: Vec<SentenceResult> = entries
                .par_iter()
                .map(|e| g.parse_sentence_as(&e.sentence, e.start.as_ref().unwrap_or(&g.start_cat)))
                .collect();
            let (mut idiomatic, mut literal, mut none, mut met) = (0, 0, 0, 0);
            for (e, r) in entries.iter().zip(&results) {
                report_diagnostics(&mut out, &e.sentence, r);
                let ok = e.expect.met_by(&r.report);
                if ok {
                    met += 1;
                } else {
                    out.stderr.push(format!("{}: `{}` does not meet {}", e.id, e.sentence, e.expect));
                    out.raise(1);
                }
                idiomatic += r.report.idiomatic as usize;
                literal += r.report.literal_only as usize;
                none += r.report.derivations.is_empty() as usize;
                let mut v = serde_json::to_value(&r.report).expect("serializable");
                v["id"] = json!(e.id);
                v["expect"] = json!(e.expect);
                v["met"] = json!(ok);
                out.stdout.push(v.to_string());
            }
            if !entries.is_empty() {
                out.stdout.push(
                    json!({"summary": {
                        "sentences": entries.len(),
                        "idiomatic": idiomatic,
                        "literal_only": literal,
                        "no_parse": none,
                        "expectations_met": met,
                    }})
                    .to_string(),
                );
            }
        }
    }
    out
}

/// `anchor (-g grammar.json | -m manifest) -w form`: one line per anchored tree.
pub fn cmd_anchor(source: &GrammarSource, form: &str) -> CmdOutput {
    let g = match source.load() {
        Ok(g) => g,
        Err(e) => return CmdOutput::failure(e),
    };
    let mut out = CmdOutput::default();
    let a = g.anchor_word(form);
    for d in &a.diagnostics {
        out.stderr.push(format!("{form}: {d}"));
        out.raise(1);
    }
    for t in &a.trees {
        out.stdout.push(
            json!({
                "form": form,
                "lemma_id": t.lemma_id,
                "is_mwe": t.is_mwe,
                "template": t.template,
                "shape": t.shape(),
                "tree": t.tree,
            })
            .to_string(),
        );
    }
    out
}

pub fn growth_stats(before: &Path, after: &Path) -> Result<GrowthStats, ProjectError> {
    let a = Counts::of(&load_project(before)?);
    let b = Counts::of(&load_project(after)?);
    Ok(GrowthStats::new(a, b))
}

/// `stats -a old.toml -b new.toml`.
pub fn cmd_stats(before: &Path, after: &Path) -> CmdOutput {
    match growth_stats(before, after) {
        Ok(s) => CmdOutput { stdout: vec![serde_json::to_string(&s).expect("serializable")], ..Default::default() },
        Err(e) => CmdOutput::failure(e),
    }
}
