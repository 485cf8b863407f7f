//! Class expansion: turns a metagrammar class into flat tree descriptions.
//!
//! Every variable of a class instance is a *slot*, a number drawn from one
//! counter per expansion. A slot serves as node variable when it appears in
//! a `<syn>` block and as feature variable when it appears in a feature
//! structure. Slots are shared between instances only through exports:
//!
//! * a positional argument `?X` passes the caller's `?X`; a bare `Name`
//!   passes a fresh slot and gives the node that public name;
//! * otherwise an export is bound to the caller's variable of the same name
//!   if the caller declares, exports or imports it;
//! * otherwise the export is private to the invoked instance.

use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write;

use log::debug;
use thiserror::Error;

use crate::dsl::{
    DslError, FsExpr, Invocation, Mark, MgClassDecl, NodeArg, NodeDecl, NodeRef, RelOp, Statement,
    TreeStatement, ValueExpr,
};
use crate::featstruct::{resolve, unify_in_place, Atom, BindingEnv, FeatureStructure, FeatureValue, VarId};

pub const DEFAULT_DESCRIPTION_CAP: usize = 10_000;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ResolveError {
    #[error("unknown class `{name}`")]
    UnknownClass { name: String },
    #[error("cyclic import: {}", path.join(" -> "))]
    CyclicImport { path: Vec<String> },
    #[error("class `{class}` takes at most {expected} node arguments, got {got}")]
    ArityMismatch { class: String, expected: usize, got: usize },
    #[error("class `{class}` does not export `{var}`")]
    UnknownExport { class: String, var: String },
    #[error("class `{class}` uses undeclared variable `?{var}`")]
    UndeclaredVariable { class: String, var: String },
    #[error("class `{class}`: `?{var}` is not bound to a class instance")]
    UnboundInstance { class: String, var: String },
    #[error("class `{class}`: `?{var}` is exported by several imports; declare it to share it")]
    NameCollision { class: String, var: String },
    #[error("unknown family `{name}`")]
    UnknownFamily { name: String },
    #[error("expanding `{class}` exceeds the cap of {cap} descriptions")]
    CapExceeded { class: String, cap: usize },
    #[error(transparent)]
    Dsl(#[from] DslError),
}

/// A linked set of classes.
#[derive(Clone, Debug, Default)]
pub struct Grammar {
    classes: Vec<MgClassDecl>,
    index: HashMap<String, usize>,
}

impl Grammar {
    /// Links class declarations: names must be unique, invoked classes must
    /// exist, the invocation graph must be acyclic and every variable must be
    /// in scope.
    pub fn new(classes: Vec<MgClassDecl>) -> Result<Self, ResolveError> {
        let mut index = HashMap::new();
        for (i, c) in classes.iter().enumerate() {
            if index.insert(c.name.clone(), i).is_some() {
                return Err(DslError::DuplicateClass { name: c.name.clone() }.into());
            }
        }
        let g = Grammar { classes, index };
        g.check_acyclic()?;
        for c in &g.classes {
            g.check_scope(c)?;
        }
        Ok(g)
    }

    pub fn class(&self, name: &str) -> Option<&MgClassDecl> {
        self.index.get(name).map(|&i| &self.classes[i])
    }

    pub fn classes(&self) -> &[MgClassDecl] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    fn lookup(&self, name: &str) -> Result<&MgClassDecl, ResolveError> {
        self.class(name).ok_or_else(|| ResolveError::UnknownClass { name: name.to_string() })
    }

    fn check_acyclic(&self) -> Result<(), ResolveError> {
        #[derive(Clone, Copy, PartialEq)]
        enum State {
            Fresh,
            Open,
            Done,
        }
        fn visit(
            g: &Grammar,
            i: usize,
            state: &mut [State],
            stack: &mut Vec<usize>,
        ) -> Result<(), ResolveError> {
            state[i] = State::Open;
            stack.push(i);
            let decl = &g.classes[i];
            let mut callees = Vec::new();
            callees.extend(decl.imports.iter().map(|inv| inv.class.as_str()));
            invoked(&decl.body, &mut callees);
            for callee in callees {
                let j = g.lookup(callee).map(|_| g.index[callee])?;
                match state[j] {
                    State::Open => {
                        let from = stack.iter().position(|&k| k == j).unwrap();
                        let mut path: Vec<String> =
                            stack[from..].iter().map(|&k| g.classes[k].name.clone()).collect();
                        path.push(g.classes[j].name.clone());
                        return Err(ResolveError::CyclicImport { path });
                    }
                    State::Fresh => visit(g, j, state, stack)?,
                    State::Done => {}
                }
            }
            stack.pop();
            state[i] = State::Done;
            Ok(())
        }
        let mut state = vec![State::Fresh; self.classes.len()];
        for i in 0..self.classes.len() {
            if state[i] == State::Fresh {
                visit(self, i, &mut state, &mut Vec::new())?;
            }
        }
        Ok(())
    }

    fn check_scope(&self, decl: &MgClassDecl) -> Result<(), ResolveError> {
        let own: BTreeSet<&String> = decl.declares.iter().chain(&decl.exports).collect();
        let mut imported = BTreeSet::new();
        for inv in &decl.imports {
            let callee = self.lookup(&inv.class)?;
            for e in &callee.exports {
                if !imported.insert(e.clone()) && !own.contains(e) {
                    return Err(ResolveError::NameCollision {
                        class: decl.name.clone(),
                        var: e.clone(),
                    });
                }
            }
        }
        crate::dsl::check_declared(decl, &imported)?;
        Ok(())
    }

    /// Expands `class` with the default description cap.
    pub fn expand(&self, class: &str) -> Result<Vec<FlatDescription>, ResolveError> {
        self.expand_with_cap(class, DEFAULT_DESCRIPTION_CAP)
    }

    pub fn expand_with_cap(&self, class: &str, cap: usize) -> Result<Vec<FlatDescription>, ResolveError> {
        let decl = self.lookup(class)?;
        let ex = Expander {
            grammar: self,
            root: class,
            cap,
            next_slot: Cell::new(0),
        };
        let (paths, _) = ex.instance(decl, &BTreeMap::new(), vec![Path::default()])?;
        Ok(paths.into_iter().map(Path::finish).collect())
    }
}

fn invoked<'a>(s: &'a Statement, out: &mut Vec<&'a str>) {
    match s {
        Statement::Conjunction(xs) | Statement::Disjunction(xs) => xs.iter().for_each(|x| invoked(x, out)),
        Statement::Invocation(inv) => out.push(&inv.class),
        _ => {}
    }
}

/// Expands `class` in `grammar`.
pub fn expand(class: &str, grammar: &Grammar) -> Result<Vec<FlatDescription>, ResolveError> {
    grammar.expand(class)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescNode {
    pub cat: Option<Atom>,
    pub mark: Mark,
    pub top: FeatureStructure,
    pub bot: FeatureStructure,
    pub name: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    pub lhs: u32,
    pub op: RelOp,
    pub rhs: u32,
}

impl Constraint {
    pub fn new(lhs: u32, op: RelOp, rhs: u32) -> Self {
        if op == RelOp::Eq && rhs < lhs {
            Constraint { lhs: rhs, op, rhs: lhs }
        } else {
            Constraint { lhs, op, rhs }
        }
    }
}

/// One disjunct path through a class: nodes, constraints and interface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatDescription {
    pub nodes: BTreeMap<u32, DescNode>,
    pub constraints: Vec<Constraint>,
    pub iface: FeatureStructure,
    pub env: BindingEnv,
    pub provenance: Vec<String>,
}

impl FlatDescription {
    pub fn resolved_iface(&self) -> FeatureStructure {
        resolve(&self.iface, &self.env)
    }

    /// Text record used by golden tests: sorted nodes, constraints, resolved iface.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        writeln!(s, "provenance {}", self.provenance.join(" ")).unwrap();
        for (v, n) in &self.nodes {
            write!(s, "  node ?{v}").unwrap();
            if let Some(name) = &n.name {
                write!(s, " ({name})").unwrap();
            }
            let cat = n.cat.as_ref().map_or("_".to_string(), |c| c.to_string());
            writeln!(
                s,
                " cat={cat} mark={} top={} bot={}",
                n.mark.as_str(),
                resolve(&n.top, &self.env),
                resolve(&n.bot, &self.env)
            )
            .unwrap();
        }
        for c in &self.constraints {
            writeln!(s, "  ?{} {} ?{}", c.lhs, c.op.symbol(), c.rhs).unwrap();
        }
        writeln!(s, "  iface {}", self.resolved_iface()).unwrap();
        s
    }
}

/// Debug dump of several descriptions, one record each.
pub fn dump_descriptions(ds: &[FlatDescription]) -> String {
    ds.iter().map(FlatDescription::dump).collect::<Vec<_>>().join("\n")
}

#[derive(Clone, Debug, Default)]
struct Path {
    nodes: BTreeMap<u32, DescNode>,
    constraints: BTreeSet<Constraint>,
    iface: FeatureStructure,
    env: BindingEnv,
    provenance: Vec<String>,
    instances: BTreeMap<u32, BTreeMap<String, u32>>,
}

impl Path {
    fn finish(self) -> FlatDescription {
        FlatDescription {
            nodes: self.nodes,
            constraints: self.constraints.into_iter().collect(),
            iface: self.iface,
            env: self.env,
            provenance: self.provenance,
        }
    }

    fn add_node(&mut self, slot: u32, node: &DescNode) -> Result<(), String> {
        self.env.register(VarId(slot));
        let Some(old) = self.nodes.get(&slot).cloned() else {
            self.env.register_all(&node.top);
            self.env.register_all(&node.bot);
            self.nodes.insert(slot, node.clone());
            return Ok(());
        };
        let cat = match (&old.cat, &node.cat) {
            (Some(a), Some(b)) if a != b => return Err(format!("cat {a} vs {b}")),
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        let mark = old
            .mark
            .combine(node.mark)
            .ok_or_else(|| format!("mark {} vs {}", old.mark.as_str(), node.mark.as_str()))?;
        let name = match (&old.name, &node.name) {
            (Some(a), Some(b)) if a != b => return Err(format!("name {a} vs {b}")),
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        let top = unify_in_place(&old.top, &node.top, &mut self.env).map_err(|e| e.to_string())?;
        let bot = unify_in_place(&old.bot, &node.bot, &mut self.env).map_err(|e| e.to_string())?;
        self.nodes.insert(
            slot,
            DescNode {
                cat,
                mark,
                top,
                bot,
                name,
            },
        );
        Ok(())
    }
}

type Scope = BTreeMap<String, u32>;

struct Expander<'g> {
    grammar: &'g Grammar,
    root: &'g str,
    cap: usize,
    next_slot: Cell<u32>,
}

impl<'g> Expander<'g> {
    fn fresh(&self) -> u32 {
        let s = self.next_slot.get();
        self.next_slot.set(s + 1);
        s
    }

    fn check_cap(&self, paths: &[Path]) -> Result<(), ResolveError> {
        if paths.len() > self.cap {
            return Err(ResolveError::CapExceeded {
                class: self.root.to_string(),
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// Expands one instance of `decl` on top of every incoming path and
    /// returns the slots of its exports.
    fn instance(
        &self,
        decl: &MgClassDecl,
        given: &Scope,
        mut paths: Vec<Path>,
    ) -> Result<(Vec<Path>, Scope), ResolveError> {
        let mut scope = Scope::new();
        for e in &decl.exports {
            let slot = given.get(e).copied().unwrap_or_else(|| self.fresh());
            scope.insert(e.clone(), slot);
        }
        for d in &decl.declares {
            if !scope.contains_key(d) {
                scope.insert(d.clone(), self.fresh());
            }
        }
        for p in &mut paths {
            p.provenance.push(decl.name.clone());
        }
        for inv in &decl.imports {
            let (next, exported) = self.invoke(decl, inv, &scope, paths)?;
            paths = next;
            for (k, v) in exported {
                scope.entry(k).or_insert(v);
            }
        }
        let paths = self.eval(decl, &decl.body, &scope, paths)?;
        let exports = decl.exports.iter().map(|e| (e.clone(), scope[e])).collect();
        Ok((paths, exports))
    }

    fn slot(&self, decl: &MgClassDecl, scope: &Scope, var: &str) -> Result<u32, ResolveError> {
        scope.get(var).copied().ok_or_else(|| ResolveError::UndeclaredVariable {
            class: decl.name.clone(),
            var: var.to_string(),
        })
    }

    fn fs(&self, decl: &MgClassDecl, scope: &Scope, fs: &FsExpr) -> Result<FeatureStructure, ResolveError> {
        let mut out = FeatureStructure::new();
        for (k, v) in fs {
            let value = match v {
                ValueExpr::Atom(a) => FeatureValue::Atom(a.clone()),
                ValueExpr::Var(n) => FeatureValue::Var(VarId(self.slot(decl, scope, n)?)),
            };
            out.insert(k.clone(), value);
        }
        Ok(out)
    }

    fn invoke(
        &self,
        caller: &MgClassDecl,
        inv: &Invocation,
        scope: &Scope,
        paths: Vec<Path>,
    ) -> Result<(Vec<Path>, Scope), ResolveError> {
        let callee = self.grammar.lookup(&inv.class)?;
        if inv.args.len() > callee.exports.len() {
            return Err(ResolveError::ArityMismatch {
                class: callee.name.clone(),
                expected: callee.exports.len(),
                got: inv.args.len(),
            });
        }
        let mut given = Scope::new();
        let mut names = Vec::new();
        for (i, e) in callee.exports.iter().enumerate() {
            let slot = match inv.args.get(i) {
                Some(NodeArg::Var(x)) => self.slot(caller, scope, x)?,
                Some(NodeArg::Name(n)) => {
                    let s = self.fresh();
                    names.push((s, n.clone()));
                    s
                }
                None => scope.get(e).copied().unwrap_or_else(|| self.fresh()),
            };
            given.insert(e.clone(), slot);
        }
        let decoration = match &inv.decoration {
            Some(d) => Some(self.fs(caller, scope, d)?),
            None => None,
        };
        let handle = match &inv.bind_to {
            Some(b) => Some(self.slot(caller, scope, b)?),
            None => None,
        };
        let (paths, exported) = self.instance(callee, &given, paths)?;
        let mut out = Vec::with_capacity(paths.len());
        'paths: for mut p in paths {
            for (slot, name) in &names {
                if let Some(n) = p.nodes.get_mut(slot) {
                    n.name = Some(name.clone());
                }
            }
            if let Some(d) = &decoration {
                match unify_in_place(&p.iface, d, &mut p.env) {
                    Ok(fs) => p.iface = fs,
                    Err(e) => {
                        debug!("{}: decoration of {} drops a path: {e}", caller.name, callee.name);
                        continue 'paths;
                    }
                }
            }
            if let Some(h) = handle {
                p.instances.insert(h, exported.clone());
            }
            out.push(p);
        }
        Ok((out, exported))
    }

    fn eval(
        &self,
        decl: &MgClassDecl,
        stmt: &Statement,
        scope: &Scope,
        paths: Vec<Path>,
    ) -> Result<Vec<Path>, ResolveError> {
        if paths.is_empty() {
            return Ok(paths);
        }
        match stmt {
            Statement::Conjunction(parts) => {
                let mut paths = paths;
                for part in parts {
                    paths = self.eval(decl, part, scope, paths)?;
                    self.check_cap(&paths)?;
                }
                Ok(paths)
            }
            Statement::Disjunction(alts) => {
                let mut out = Vec::new();
                for alt in alts {
                    out.extend(self.eval(decl, alt, scope, paths.clone())?);
                    self.check_cap(&out)?;
                }
                Ok(out)
            }
            Statement::Syn(stmts) => {
                let mut nodes = Vec::new();
                let mut cons = Vec::new();
                for t in stmts {
                    match t {
                        TreeStatement::Node(n) => {
                            self.fragment(decl, scope, n, &mut nodes, &mut cons)?;
                        }
                        TreeStatement::Relation { lhs, op, rhs } => {
                            let (l, r) = (self.slot(decl, scope, lhs)?, self.slot(decl, scope, rhs)?);
                            cons.push(Constraint::new(l, *op, r));
                        }
                    }
                }
                let mut out = Vec::with_capacity(paths.len());
                'paths: for mut p in paths {
                    for (slot, node) in &nodes {
                        if let Err(e) = p.add_node(*slot, node) {
                            debug!("{}: node ?{slot} clash drops a path: {e}", decl.name);
                            continue 'paths;
                        }
                    }
                    p.constraints.extend(cons.iter().copied());
                    out.push(p);
                }
                Ok(out)
            }
            Statement::Iface(fs) => {
                let fs = self.fs(decl, scope, fs)?;
                Ok(paths
                    .into_iter()
                    .filter_map(|mut p| match unify_in_place(&p.iface, &fs, &mut p.env) {
                        Ok(u) => {
                            p.iface = u;
                            Some(p)
                        }
                        Err(e) => {
                            debug!("{}: iface clash drops a path: {e}", decl.name);
                            None
                        }
                    })
                    .collect())
            }
            Statement::Invocation(inv) => Ok(self.invoke(decl, inv, scope, paths)?.0),
            Statement::NodeEquation { lhs, rhs } => {
                let l = self.slot(decl, scope, lhs)?;
                let mut out = Vec::with_capacity(paths.len());
                for mut p in paths {
                    let r = match rhs {
                        NodeRef::Var(v) => self.slot(decl, scope, v)?,
                        NodeRef::Field { var, field } => {
                            let h = self.slot(decl, scope, var)?;
                            let inst = p.instances.get(&h).ok_or_else(|| ResolveError::UnboundInstance {
                                class: decl.name.clone(),
                                var: var.clone(),
                            })?;
                            *inst.get(field).ok_or_else(|| ResolveError::UnknownExport {
                                class: decl.name.clone(),
                                var: field.clone(),
                            })?
                        }
                    };
                    p.constraints.insert(Constraint::new(l, RelOp::Eq, r));
                    out.push(p);
                }
                Ok(out)
            }
        }
    }

    /// Flattens a nested node declaration into slots and constraints.
    fn fragment(
        &self,
        decl: &MgClassDecl,
        scope: &Scope,
        n: &NodeDecl,
        nodes: &mut Vec<(u32, DescNode)>,
        cons: &mut Vec<Constraint>,
    ) -> Result<u32, ResolveError> {
        let slot = match &n.var {
            Some(v) => self.slot(decl, scope, v)?,
            None => self.fresh(),
        };
        nodes.push((
            slot,
            DescNode {
                cat: n.cat.clone(),
                mark: n.mark,
                top: self.fs(decl, scope, &n.top)?,
                bot: self.fs(decl, scope, &n.bot)?,
                name: n.name.clone(),
            },
        ));
        let mut prev = None;
        for c in &n.children {
            let child = self.fragment(decl, scope, c, nodes, cons)?;
            cons.push(Constraint::new(slot, RelOp::Idom, child));
            if let Some(p) = prev {
                cons.push(Constraint::new(p, RelOp::Prec, child));
            }
            prev = Some(child);
        }
        Ok(slot)
    }
}

/// Maps family names to the class that roots them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FamilyTable {
    pub families: BTreeMap<String, String>,
}

impl FamilyTable {
    pub fn class_of(&self, family: &str) -> Option<&str> {
        self.families.get(family).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.families.len()
    }

    pub fn is_empty(&self) -> bool {
        self.families.is_empty()
    }
}

/// Registers every named family; each must be a class of `grammar`.
pub fn build_family_table<'a>(
    grammar: &Grammar,
    families: impl IntoIterator<Item = &'a str>,
) -> Result<FamilyTable, ResolveError> {
    let mut table = FamilyTable::default();
    for f in families {
        if grammar.class(f).is_none() {
            return Err(ResolveError::UnknownFamily { name: f.to_string() });
        }
        table.families.insert(f.to_string(), f.to_string());
    }
    Ok(table)
}
