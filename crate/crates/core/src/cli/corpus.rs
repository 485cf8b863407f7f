use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ProjectError;
use crate::featstruct::Atom;
use crate::tagparser::ParseReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Idiomatic,
    LiteralOnly,
    NoParse,
}

impl Expectation {
    pub fn met_by(self, report: &ParseReport) -> bool {
        match self {
            Expectation::Idiomatic => report.idiomatic,
            Expectation::LiteralOnly => report.literal_only,
            Expectation::NoParse => report.derivations.is_empty(),
        }
    }
}

impl FromStr for Expectation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "expect-idiomatic" => Ok(Expectation::Idiomatic),
            "expect-literal-only" => Ok(Expectation::LiteralOnly),
            "expect-no-parse" => Ok(Expectation::NoParse),
            _ => Err(format!("unknown expectation `{s}`")),
        }
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expectation::Idiomatic => "expect-idiomatic",
            Expectation::LiteralOnly => "expect-literal-only",
            Expectation::NoParse => "expect-no-parse",
        })
    }
}

/// One corpus line: `sentence TAB expectation TAB example-id [TAB start=cat]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub sentence: String,
    pub expect: Expectation,
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Atom>,
}

/// Reads a corpus file. Blank lines and lines starting with `#` are ignored.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>, ProjectError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| ProjectError::Corpus { line: n + 1, message };
        let cols: Vec<&str> = line.split('\t').collect();
        if !(3..=4).contains(&cols.len()) {
            return Err(bad(format!("expected 3 or 4 tab-separated columns, got {}", cols.len())));
        }
        let expect = cols[1].trim().parse().map_err(bad)?;
        let start = match cols.get(3) {
            None => None,
            Some(c) => {
                let cat = c.trim().strip_prefix("start=").ok_or_else(|| bad(format!("bad column `{c}`")))?;
                Some(Atom::new(cat).map_err(|e| bad(e.to_string()))?)
            }
        };
        out.push(CorpusEntry {
            sentence: cols[0].trim().to_string(),
            expect,
            id: cols[2].trim().to_string(),
            start,
        });
    }
    Ok(out)
}
