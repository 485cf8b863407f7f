//! Flat, untyped feature structures with shared variables.
//!
//! A [`FeatureStructure`] maps attribute names to either an atom or a
//! variable. Variables live in a [`BindingEnv`], a union-find partition in
//! which every class may be bound to at most one atom. Unification never
//! mutates its inputs: it returns a new structure together with an extended
//! copy of the environment, so callers can explore alternatives and simply
//! drop the ones that fail.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// An atomic feature value such as `sg`, `active` or `lexDetLexN`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(String);

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid atom {0:?}")]
pub struct InvalidAtom(pub String);

impl Atom {
    pub fn new(s: impl Into<String>) -> Result<Self, InvalidAtom> {
        let s = s.into();
        if Self::is_valid(&s) {
            Ok(Atom(s))
        } else {
            Err(InvalidAtom(s))
        }
    }

    /// Atoms are non-empty words over `[A-Za-z0-9_+-]`; comparison is byte-exact.
    pub fn is_valid(s: &str) -> bool {
        !s.is_empty()
            && s
                .bytes()
                .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'+' | b'-'))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Atom {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Atom {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Atom::new(s).map_err(serde::de::Error::custom)
    }
}

/// Identifier of a feature variable, rendered `?N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureValue {
    Atom(Atom),
    Var(VarId),
}

impl FeatureValue {
    pub fn atom(s: &str) -> Self {
        FeatureValue::Atom(Atom::new(s).expect("valid atom literal"))
    }

    /// Parses the textual rendering: `?N` is a variable, anything else an atom.
    pub fn parse(s: &str) -> Option<Self> {
        match s.strip_prefix('?') {
            Some(n) => n.parse().ok().map(|n| FeatureValue::Var(VarId(n))),
            None => Atom::new(s).ok().map(FeatureValue::Atom),
        }
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Atom(a) => a.fmt(f),
            FeatureValue::Var(v) => v.fmt(f),
        }
    }
}

/// A flat attribute/value map. The empty structure is the unification identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureStructure {
    entries: BTreeMap<String, FeatureValue>,
}

impl FeatureStructure {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a ground structure from `(attribute, atom)` pairs.
    ///
    /// Panics on invalid atoms; intended for literals in code and tests.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let mut fs = Self::new();
        for (k, v) in pairs {
            fs.insert(k, FeatureValue::atom(v));
        }
        fs
    }

    pub fn insert(&mut self, attr: impl Into<String>, value: FeatureValue) -> Option<FeatureValue> {
        self.entries.insert(attr.into(), value)
    }

    pub fn get(&self, attr: &str) -> Option<&FeatureValue> {
        self.entries.get(attr)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &FeatureValue)> {
        self.entries.iter()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.entries.values().filter_map(|v| match v {
            FeatureValue::Var(v) => Some(*v),
            FeatureValue::Atom(_) => None,
        })
    }

    /// Applies `f` to every variable, leaving atoms alone.
    pub fn map_vars(&self, mut f: impl FnMut(VarId) -> FeatureValue) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(k, v)| {
                let v = match v {
                    FeatureValue::Var(id) => f(*id),
                    atom => atom.clone(),
                };
                (k.clone(), v)
            })
            .collect();
        FeatureStructure { entries }
    }

    /// Parses `[a=b, c=?3]` (brackets optional, empty allowed).
    pub fn parse(text: &str) -> Option<Self> {
        let t = text.trim();
        let t = t.strip_prefix('[').and_then(|t| t.strip_suffix(']')).unwrap_or(t);
        let mut fs = Self::new();
        for part in t.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=')?;
            let k = k.trim();
            if !Atom::is_valid(k) {
                return None;
            }
            fs.insert(k, FeatureValue::parse(v.trim())?);
        }
        Some(fs)
    }
}

impl fmt::Display for FeatureStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("]")
    }
}

impl FromIterator<(String, FeatureValue)> for FeatureStructure {
    fn from_iter<I: IntoIterator<Item = (String, FeatureValue)>>(iter: I) -> Self {
        FeatureStructure {
            entries: iter.into_iter().collect(),
        }
    }
}

impl Serialize for FeatureStructure {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.entries.iter().map(|(k, v)| (k, v.to_string())))
    }
}

impl<'de> Deserialize<'de> for FeatureStructure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                FeatureValue::parse(&v)
                    .map(|v| (k, v))
                    .ok_or_else(|| serde::de::Error::custom(format!("bad feature value {v:?}")))
            })
            .collect()
    }
}

/// Union-find over variables; each class is optionally bound to one atom.
///
/// Links always point from the larger id to the smaller one, so the
/// representative of a class is its minimum variable and resolution is
/// independent of the order in which unifications happened.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BindingEnv {
    links: BTreeMap<VarId, VarId>,
    bound: BTreeMap<VarId, Atom>,
    next: u32,
}

impl BindingEnv {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns a variable not yet known to this environment.
    pub fn fresh(&mut self) -> VarId {
        let v = VarId(self.next);
        self.next += 1;
        v
    }

    /// Makes sure `fresh` never hands out `v` (or anything below it).
    pub fn register(&mut self, v: VarId) {
        self.next = self.next.max(v.0 + 1);
    }

    pub fn register_all(&mut self, fs: &FeatureStructure) {
        for v in fs.vars() {
            self.register(v);
        }
    }

    pub fn find(&self, mut v: VarId) -> VarId {
        while let Some(&p) = self.links.get(&v) {
            v = p;
        }
        v
    }

    pub fn binding(&self, v: VarId) -> Option<&Atom> {
        self.bound.get(&self.find(v))
    }

    /// The value a variable currently stands for: its atom, or its representative.
    pub fn value_of(&self, v: VarId) -> FeatureValue {
        let root = self.find(v);
        match self.bound.get(&root) {
            Some(a) => FeatureValue::Atom(a.clone()),
            None => FeatureValue::Var(root),
        }
    }

    pub fn resolve_value(&self, v: &FeatureValue) -> FeatureValue {
        match v {
            FeatureValue::Var(id) => self.value_of(*id),
            atom => atom.clone(),
        }
    }

    /// Binds a variable to an atom; fails if its class already holds another atom.
    pub fn bind(&mut self, v: VarId, atom: &Atom) -> Result<(), Atom> {
        self.register(v);
        let root = self.find(v);
        match self.bound.get(&root) {
            Some(existing) if existing != atom => Err(existing.clone()),
            Some(_) => Ok(()),
            None => {
                self.bound.insert(root, atom.clone());
                Ok(())
            }
        }
    }

    /// Merges two variable classes.
    pub fn merge(&mut self, a: VarId, b: VarId) -> Result<(), (Atom, Atom)> {
        self.register(a);
        self.register(b);
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return Ok(());
        }
        let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
        match (self.bound.get(&keep).cloned(), self.bound.get(&drop).cloned()) {
            (Some(x), Some(y)) if x != y => return Err((x, y)),
            (None, Some(y)) => {
                self.bound.insert(keep, y);
            }
            _ => {}
        }
        self.bound.remove(&drop);
        self.links.insert(drop, keep);
        Ok(())
    }

    /// Unifies two values in place.
    pub fn unify_values(&mut self, x: &FeatureValue, y: &FeatureValue) -> Result<(), ()> {
        match (self.resolve_value(x), self.resolve_value(y)) {
            (FeatureValue::Atom(a), FeatureValue::Atom(b)) => (a == b).then_some(()).ok_or(()),
            (FeatureValue::Var(v), FeatureValue::Atom(a))
            | (FeatureValue::Atom(a), FeatureValue::Var(v)) => self.bind(v, &a).map_err(|_| ()),
            (FeatureValue::Var(a), FeatureValue::Var(b)) => self.merge(a, b).map_err(|_| ()),
        }
    }

    /// Variables with a binding or a link, i.e. the ones this env knows something about.
    pub fn constrained_vars(&self) -> BTreeSet<VarId> {
        self.links.keys().chain(self.bound.keys()).copied().collect()
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("unification failure on `{attribute}`: {left} vs {right}")]
pub struct UnificationFailure {
    pub attribute: String,
    pub left: String,
    pub right: String,
}

/// Non-destructive unification.
///
/// The result holds the union of attributes. Shared attributes carry their
/// unified (resolved) value; the others are copied unchanged.
pub fn unify(
    a: &FeatureStructure,
    b: &FeatureStructure,
    env: &BindingEnv,
) -> Result<(FeatureStructure, BindingEnv), UnificationFailure> {
    let mut env = env.clone();
    let out = unify_in_place(a, b, &mut env)?;
    Ok((out, env))
}

/// Like [`unify`], but extends `env` directly. On failure `env` may hold
/// partial bindings and should be discarded.
pub fn unify_in_place(
    a: &FeatureStructure,
    b: &FeatureStructure,
    env: &mut BindingEnv,
) -> Result<FeatureStructure, UnificationFailure> {
    env.register_all(a);
    env.register_all(b);
    let mut out = a.clone();
    for (attr, vb) in &b.entries {
        match a.entries.get(attr) {
            None => {
                out.entries.insert(attr.clone(), vb.clone());
            }
            Some(va) => {
                if env.unify_values(va, vb).is_err() {
                    return Err(UnificationFailure {
                        attribute: attr.clone(),
                        left: env.resolve_value(va).to_string(),
                        right: env.resolve_value(vb).to_string(),
                    });
                }
                out.entries.insert(attr.clone(), env.resolve_value(va));
            }
        }
    }
    Ok(out)
}

/// Replaces every variable by its atom (if bound) or by its class representative.
pub fn resolve(fs: &FeatureStructure, env: &BindingEnv) -> FeatureStructure {
    fs.map_vars(|v| env.value_of(v))
}
