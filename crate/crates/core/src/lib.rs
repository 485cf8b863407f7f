//! Metagrammar compilation for Tree-Adjoining Grammars with multiword
//! expressions.
//!
//! A metagrammar is a set of classes written in a small XMG-like language
//! ([`dsl`]). Classes are expanded into flat tree descriptions ([`resolver`]),
//! whose minimal models become elementary tree templates ([`treesolver`]).
//! Lexical entries select and anchor templates, coanchors included
//! ([`anchoring`]), and a chart parser ([`tagparser`]) reports derivations and
//! whether a multiword expression reading was found. Feature structures and
//! unification live in [`featstruct`]. [`minigrammar`] bundles a small French
//! grammar, and [`cli`] backs the `metagramme` binary.

pub mod anchoring;
pub mod cli;
pub mod dsl;
pub mod featstruct;
pub mod minigrammar;
pub mod resolver;
pub mod tagparser;
pub mod treesolver;
