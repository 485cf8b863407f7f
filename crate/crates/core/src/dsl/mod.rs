//! Front end for the three source kinds: metagrammar classes (`.mg`), lemma
//! entries (`.lex`) and inflected forms (`.morph`).
//!
//! Concrete syntax of a class:
//!
//! ```text
//! class CanSubject
//! export ?VN
//! declare ?VN
//! {
//!   <syn>{ node [cat=s] { node [cat=n] node ?VN [cat=vn] } }
//! }
//! ```
//!
//! Statements combine with `;` (conjunction, binds tighter) and `|`
//! (disjunction). Tree relations are `->` (immediate dominance), `->*`
//! (dominance), `>>` (immediate precedence), `>>*` (precedence) and `=`.
//! Sibling nodes written inside braces are ordered by `>>*`. `%` starts a
//! comment.

mod ast;
mod lexer;
mod parser;
mod pretty;

pub use ast::*;
pub use parser::{parse_lexicon, parse_metagrammar};
pub(crate) use parser::check_declared;
pub use pretty::{pretty_lexicon, pretty_metagrammar};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DslError {
    #[error("{line}:{col}: syntax error, expected {expected}")]
    Syntax { line: u32, col: u32, expected: String },
    #[error("class `{class}` uses undeclared variable `?{var}`")]
    UndeclaredVariable { class: String, var: String },
    #[error("class `{name}` is defined twice")]
    DuplicateClass { name: String },
    #[error("<{block}> block is missing field `{field}`")]
    MissingField { block: String, field: String },
}
