use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::featstruct::{Atom, FeatureStructure};

/// 1-based source position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mark {
    #[default]
    None,
    Anchor,
    Subst,
    Foot,
    Coanchor,
}

impl Mark {
    pub fn parse(s: &str) -> Option<Mark> {
        Some(match s {
            "none" => Mark::None,
            "anchor" => Mark::Anchor,
            "subst" => Mark::Subst,
            "foot" => Mark::Foot,
            "coanchor" => Mark::Coanchor,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mark::None => "none",
            Mark::Anchor => "anchor",
            Mark::Subst => "subst",
            Mark::Foot => "foot",
            Mark::Coanchor => "coanchor",
        }
    }

    /// Marked nodes must be leaves in every model.
    pub fn is_leaf_mark(self) -> bool {
        self != Mark::None
    }

    /// `none` combines with anything; two non-`none` marks only with themselves.
    pub fn combine(self, other: Mark) -> Option<Mark> {
        match (self, other) {
            (Mark::None, m) | (m, Mark::None) => Some(m),
            (a, b) if a == b => Some(a),
            _ => None,
        }
    }

    /// Suffix used in tree shapes: `⋄` anchor, `↓` substitution, `*` foot, `=` coanchor.
    pub fn suffix(self) -> &'static str {
        match self {
            Mark::None => "",
            Mark::Anchor => "⋄",
            Mark::Subst => "↓",
            Mark::Foot => "*",
            Mark::Coanchor => "=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelOp {
    /// `->`
    Idom,
    /// `->*`
    Dom,
    /// `>>`
    Iprec,
    /// `>>*`
    Prec,
    /// `=`
    Eq,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Idom => "->",
            RelOp::Dom => "->*",
            RelOp::Iprec => ">>",
            RelOp::Prec => ">>*",
            RelOp::Eq => "=",
        }
    }
}

/// A feature value as written in source: an atom or a named variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueExpr {
    Atom(Atom),
    Var(String),
}

/// Source-level feature structure; variables are still names.
pub type FsExpr = BTreeMap<String, ValueExpr>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MgClassDecl {
    pub name: String,
    pub imports: Vec<Invocation>,
    pub exports: Vec<String>,
    pub declares: Vec<String>,
    pub body: Statement,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Statement {
    /// `a ; b`
    Conjunction(Vec<Statement>),
    /// `a | b`
    Disjunction(Vec<Statement>),
    Syn(Vec<TreeStatement>),
    Iface(FsExpr),
    Invocation(Invocation),
    /// `?a = ?b` or `?a = ?inst.Exported`
    NodeEquation { lhs: String, rhs: NodeRef },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invocation {
    pub class: String,
    pub args: Vec<NodeArg>,
    /// `*= [..]`
    pub decoration: Option<FsExpr>,
    /// `?x = Class[..]`
    pub bind_to: Option<String>,
}

impl Invocation {
    pub fn plain(class: &str) -> Self {
        Invocation {
            class: class.to_string(),
            args: Vec::new(),
            decoration: None,
            bind_to: None,
        }
    }
}

/// Positional argument of an invocation, matched against the callee's exports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeArg {
    /// Shares the export with a variable of the caller.
    Var(String),
    /// Gives the exported node a public name (used by coanchors and equations).
    Name(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeRef {
    Var(String),
    Field { var: String, field: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeStatement {
    Node(NodeDecl),
    Relation { lhs: String, op: RelOp, rhs: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NodeDecl {
    pub var: Option<String>,
    pub name: Option<String>,
    pub cat: Option<Atom>,
    pub mark: Mark,
    pub top: FsExpr,
    pub bot: FsExpr,
    pub children: Vec<NodeDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coanchor {
    pub node: String,
    pub form: String,
    pub cat: Atom,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equation {
    pub node: String,
    pub features: FeatureStructure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaEntryDecl {
    /// Name of the lexicon class, e.g. `mweLemmePrendreLaPorte`.
    pub name: String,
    pub entry: String,
    pub cat: Atom,
    pub fam: String,
    pub filters: FeatureStructure,
    pub coanchors: Vec<Coanchor>,
    pub equations: Vec<Equation>,
}

impl LemmaEntryDecl {
    pub fn is_mwe(&self) -> bool {
        !self.coanchors.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphEntryDecl {
    pub name: String,
    pub morph: String,
    pub lemma: String,
    pub cat: Atom,
    pub feats: FeatureStructure,
}
