//! Minimal models of tree descriptions.
//!
//! A model identifies description variables into cells and arranges the
//! cells in a rooted ordered tree so that every constraint holds:
//! `->` is the parent relation, `->*` strict dominance, `>>` adjacent
//! siblings, `>>*` left-of (neither node dominating the other) and `=`
//! identity. Only models with the fewest cells are kept; every sibling
//! order they allow is a separate model.

mod template;

pub use template::{TemplateNode, TreeKind, TreeTemplate};

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{Mark, RelOp};
use crate::featstruct::{resolve, unify_in_place, Atom, BindingEnv, FeatureStructure};
use crate::resolver::{Constraint, FlatDescription, Grammar, ResolveError, DEFAULT_DESCRIPTION_CAP};

pub const DEFAULT_MAX_VARIABLES: usize = 12;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("ill-formed description: {reason}")]
    IllFormedDescription { reason: String },
    #[error("description has {count} node variables, more than the cap of {cap}")]
    TooManyVariables { count: usize, cap: usize },
    #[error(transparent)]
    Resolve(#[from] ResolveError),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelStatistics {
    pub descriptions_in: usize,
    pub models_out: usize,
    pub identifications_tried: usize,
    pub eliminated_by: BTreeMap<String, usize>,
}

impl ModelStatistics {
    fn eliminate(&mut self, reason: &str) {
        *self.eliminated_by.entry(reason.to_string()).or_default() += 1;
    }

    pub fn absorb(&mut self, other: &ModelStatistics) {
        self.descriptions_in += other.descriptions_in;
        self.models_out += other.models_out;
        self.identifications_tried += other.identifications_tried;
        for (k, v) in &other.eliminated_by {
            *self.eliminated_by.entry(k.clone()).or_default() += v;
        }
    }
}

/// A model: cells in preorder, each listing the description variables it
/// identifies (sorted), and the parent of each cell. The children of a cell
/// are the cells naming it as parent, in increasing order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Model {
    pub cells: Vec<Vec<u32>>,
    pub parent: Vec<Option<usize>>,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverCaps {
    pub max_variables: usize,
    pub max_descriptions: usize,
}

impl Default for SolverCaps {
    fn default() -> Self {
        SolverCaps {
            max_variables: DEFAULT_MAX_VARIABLES,
            max_descriptions: DEFAULT_DESCRIPTION_CAP,
        }
    }
}

/// Merged properties of a cell.
#[derive(Clone, Debug)]
struct CellInfo {
    cat: Option<Atom>,
    mark: Mark,
    name: Option<String>,
}

impl CellInfo {
    fn merge(&self, other: &CellInfo) -> Option<CellInfo> {
        let cat = match (&self.cat, &other.cat) {
            (Some(a), Some(b)) if a != b => return None,
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        let mark = self.mark.combine(other.mark)?;
        let name = match (&self.name, &other.name) {
            (Some(a), Some(b)) if a != b => return None,
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        Some(CellInfo { cat, mark, name })
    }
}

struct Problem<'d> {
    desc: &'d FlatDescription,
    vars: Vec<u32>,
    /// Units are eq-connected groups of variable indices.
    units: Vec<Vec<usize>>,
    unit_info: Vec<CellInfo>,
    differ: Vec<Vec<bool>>,
    /// Constraints over unit indices, eq excluded.
    cons: Vec<(usize, RelOp, usize)>,
}

/// All minimal models of `d`, with statistics.
pub fn solve_models(d: &FlatDescription, max_variables: usize) -> Result<(Vec<Model>, ModelStatistics), SolveError> {
    let mut stats = ModelStatistics {
        descriptions_in: 1,
        ..Default::default()
    };
    let d = &*dealias(d);
    let Some(p) = Problem::new(d, max_variables, &mut stats)? else {
        return Ok((Vec::new(), stats));
    };
    let mut partitions = Vec::new();
    p.partitions(0, &mut Vec::new(), &mut Vec::new(), &mut partitions);
    partitions.sort_by_key(|(cells, _): &(Vec<Vec<usize>>, Vec<CellInfo>)| cells.len());
    let mut models = BTreeSet::new();
    let mut best = None;
    for (cells, info) in &partitions {
        if best.is_some_and(|k| cells.len() > k) {
            break;
        }
        if p.cell_env(cells).is_none() {
            stats.eliminate("features");
            continue;
        }
        if !p.cell_check(info, &mut stats) {
            continue;
        }
        let found = p.trees(cells, info, &mut stats);
        if !found.is_empty() {
            best = Some(cells.len());
            models.extend(found);
        }
    }
    let models: Vec<Model> = models.into_iter().collect();
    stats.models_out = models.len();
    Ok((models, stats))
}

impl<'d> Problem<'d> {
    fn new(
        d: &'d FlatDescription,
        max_variables: usize,
        stats: &mut ModelStatistics,
    ) -> Result<Option<Self>, SolveError> {
        let vars: Vec<u32> = d.nodes.keys().copied().collect();
        let index: BTreeMap<u32, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        for c in &d.constraints {
            for v in [c.lhs, c.rhs] {
                if !index.contains_key(&v) {
                    return Err(SolveError::IllFormedDescription {
                        reason: format!("constraint refers to ?{v}, which is not a node"),
                    });
                }
            }
        }
        if vars.len() > max_variables {
            return Err(SolveError::TooManyVariables {
                count: vars.len(),
                cap: max_variables,
            });
        }
        check_dominance_cycles(d)?;

        let n = vars.len();
        let mut uf: Vec<usize> = (0..n).collect();
        fn find(uf: &mut [usize], mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        for c in d.constraints.iter().filter(|c| c.op == RelOp::Eq) {
            let (a, b) = (find(&mut uf, index[&c.lhs]), find(&mut uf, index[&c.rhs]));
            uf[a.max(b)] = a.min(b);
        }
        let mut unit_of = vec![usize::MAX; n];
        let mut units: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let r = find(&mut uf, i);
            if unit_of[r] == usize::MAX {
                unit_of[r] = units.len();
                units.push(Vec::new());
            }
            unit_of[i] = unit_of[r];
            units[unit_of[i]].push(i);
        }
        let mut unit_info = Vec::new();
        for u in &units {
            let mut info: Option<CellInfo> = None;
            for &i in u {
                let node = &d.nodes[&vars[i]];
                let mine = CellInfo {
                    cat: node.cat.clone(),
                    mark: node.mark,
                    name: node.name.clone(),
                };
                info = match info {
                    None => Some(mine),
                    Some(prev) => match prev.merge(&mine) {
                        Some(m) => Some(m),
                        None => {
                            stats.eliminate("eq-clash");
                            return Ok(None);
                        }
                    },
                };
            }
            unit_info.push(info.unwrap());
        }
        let m = units.len();
        let mut differ = vec![vec![false; m]; m];
        let mut cons = Vec::new();
        for c in d.constraints.iter().filter(|c| c.op != RelOp::Eq) {
            let (a, b) = (unit_of[index[&c.lhs]], unit_of[index[&c.rhs]]);
            if a == b {
                stats.eliminate("irreflexive");
                return Ok(None);
            }
            differ[a][b] = true;
            differ[b][a] = true;
            cons.push((a, c.op, b));
        }
        cons.sort();
        cons.dedup();
        let p = Problem {
            desc: d,
            vars,
            units,
            unit_info,
            differ,
            cons,
        };
        if p.unit_env(&(0..m).map(|u| vec![u]).collect::<Vec<_>>()).is_none() {
            stats.eliminate("eq-clash");
            return Ok(None);
        }
        Ok(Some(p))
    }

    /// Enumerates set partitions of the units, pruned by cell compatibility.
    fn partitions(
        &self,
        u: usize,
        cells: &mut Vec<Vec<usize>>,
        info: &mut Vec<CellInfo>,
        out: &mut Vec<(Vec<Vec<usize>>, Vec<CellInfo>)>,
    ) {
        if u == self.units.len() {
            out.push((cells.clone(), info.clone()));
            return;
        }
        for c in 0..cells.len() {
            if cells[c].iter().any(|&w| self.differ[u][w]) {
                continue;
            }
            let Some(merged) = info[c].merge(&self.unit_info[u]) else {
                continue;
            };
            let saved = std::mem::replace(&mut info[c], merged);
            cells[c].push(u);
            self.partitions(u + 1, cells, info, out);
            cells[c].pop();
            info[c] = saved;
        }
        cells.push(vec![u]);
        info.push(self.unit_info[u].clone());
        self.partitions(u + 1, cells, info, out);
        cells.pop();
        info.pop();
    }

    fn unit_env(&self, cells: &[Vec<usize>]) -> Option<(BindingEnv, Vec<(FeatureStructure, FeatureStructure)>)> {
        let mut env = self.desc.env.clone();
        let mut fss = Vec::new();
        for cell in cells {
            let (mut top, mut bot) = (FeatureStructure::new(), FeatureStructure::new());
            for &u in cell {
                for &i in &self.units[u] {
                    let node = &self.desc.nodes[&self.vars[i]];
                    top = unify_in_place(&top, &node.top, &mut env).ok()?;
                    bot = unify_in_place(&bot, &node.bot, &mut env).ok()?;
                }
            }
            fss.push((top, bot));
        }
        Some((env, fss))
    }

    fn cell_env(&self, cells: &[Vec<usize>]) -> Option<(BindingEnv, Vec<(FeatureStructure, FeatureStructure)>)> {
        self.unit_env(cells)
    }

    fn cell_check(&self, info: &[CellInfo], stats: &mut ModelStatistics) -> bool {
        if info.iter().any(|c| c.cat.is_none()) {
            stats.eliminate("missing-cat");
            return false;
        }
        if info.iter().filter(|c| c.mark == Mark::Anchor).count() != 1 {
            stats.eliminate("anchor-count");
            return false;
        }
        if info.iter().filter(|c| c.mark == Mark::Foot).count() > 1 {
            stats.eliminate("foot-count");
            return false;
        }
        true
    }

    /// All ordered trees over the cells of one partition.
    fn trees(&self, cells: &[Vec<usize>], info: &[CellInfo], stats: &mut ModelStatistics) -> Vec<Model> {
        let k = cells.len();
        let mut cell_of = vec![0; self.units.len()];
        for (c, members) in cells.iter().enumerate() {
            for &u in members {
                cell_of[u] = c;
            }
        }
        let cons: Vec<(usize, RelOp, usize)> =
            self.cons.iter().map(|&(a, op, b)| (cell_of[a], op, cell_of[b])).collect();
        let mut parent: Vec<Option<usize>> = vec![None; k];
        for &(a, op, b) in &cons {
            if op == RelOp::Idom {
                if info[a].mark.is_leaf_mark() || parent[b].is_some_and(|p| p != a) {
                    stats.eliminate("tree");
                    return Vec::new();
                }
                parent[b] = Some(a);
            }
        }
        let free: Vec<usize> = (0..k).filter(|&c| parent[c].is_none()).collect();
        let mut out = Vec::new();
        for &root in &free {
            let others: Vec<usize> = free.iter().copied().filter(|&c| c != root).collect();
            let mut par = parent.clone();
            self.assign_parents(root, &others, 0, &mut par, info, &cons, cells, stats, &mut out);
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn assign_parents(
        &self,
        root: usize,
        free: &[usize],
        i: usize,
        par: &mut Vec<Option<usize>>,
        info: &[CellInfo],
        cons: &[(usize, RelOp, usize)],
        cells: &[Vec<usize>],
        stats: &mut ModelStatistics,
        out: &mut Vec<Model>,
    ) {
        if i == free.len() {
            self.order_children(root, par, info, cons, cells, stats, out);
            return;
        }
        let c = free[i];
        for p in 0..par.len() {
            if p == c || info[p].mark.is_leaf_mark() {
                continue;
            }
            par[c] = Some(p);
            self.assign_parents(root, free, i + 1, par, info, cons, cells, stats, out);
        }
        par[c] = None;
    }

    #[allow(clippy::too_many_arguments)]
    fn order_children(
        &self,
        root: usize,
        par: &[Option<usize>],
        info: &[CellInfo],
        cons: &[(usize, RelOp, usize)],
        cells: &[Vec<usize>],
        stats: &mut ModelStatistics,
        out: &mut Vec<Model>,
    ) {
        let k = par.len();
        // Every cell must reach the root, which has no parent.
        if par[root].is_some() {
            return;
        }
        let mut ancestors: Vec<Vec<usize>> = Vec::with_capacity(k);
        for c in 0..k {
            let mut chain = Vec::new();
            let mut cur = c;
            while let Some(p) = par[cur] {
                if chain.len() > k {
                    stats.eliminate("tree");
                    return;
                }
                chain.push(p);
                cur = p;
            }
            if cur != root {
                return;
            }
            ancestors.push(chain);
        }
        if info.iter().enumerate().any(|(c, ci)| ci.mark.is_leaf_mark() && par.contains(&Some(c))) {
            stats.eliminate("leaf-mark");
            return;
        }
        let dominates = |a: usize, b: usize| ancestors[b].contains(&a);
        // Sibling-order requirements: (parent, left child, right child, adjacent).
        let mut reqs: Vec<(usize, usize, usize, bool)> = Vec::new();
        for &(a, op, b) in cons {
            match op {
                RelOp::Dom if !dominates(a, b) => {
                    stats.eliminate("dom");
                    return;
                }
                RelOp::Iprec | RelOp::Prec => {
                    if dominates(a, b) || dominates(b, a) {
                        stats.eliminate("prec");
                        return;
                    }
                    if op == RelOp::Iprec && par[a] != par[b] {
                        stats.eliminate("prec");
                        return;
                    }
                    // Lowest common ancestor and the two branches below it.
                    let path_a: Vec<usize> = std::iter::once(a).chain(ancestors[a].iter().copied()).collect();
                    let path_b: Vec<usize> = std::iter::once(b).chain(ancestors[b].iter().copied()).collect();
                    let ia = path_a.iter().position(|x| path_b.contains(x)).unwrap();
                    let lca = path_a[ia];
                    let ib = path_b.iter().position(|&x| x == lca).unwrap();
                    reqs.push((lca, path_a[ia - 1], path_b[ib - 1], op == RelOp::Iprec));
                }
                _ => {}
            }
        }
        if let Some(f) = info.iter().position(|c| c.mark == Mark::Foot) {
            if info[f].cat != info[root].cat {
                stats.eliminate("foot-cat");
                return;
            }
        }
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); k];
        for c in 0..k {
            if let Some(p) = par[c] {
                children[p].push(c);
            }
        }
        let mut per_parent: Vec<Vec<Vec<usize>>> = Vec::with_capacity(k);
        for (p, kids) in children.iter().enumerate() {
            let mine: Vec<_> = reqs.iter().filter(|r| r.0 == p).collect();
            let orders: Vec<Vec<usize>> = permutations(kids)
                .into_iter()
                .filter(|perm| {
                    mine.iter().all(|&&(_, l, r, adj)| {
                        let (pl, pr) = (
                            perm.iter().position(|&x| x == l).unwrap(),
                            perm.iter().position(|&x| x == r).unwrap(),
                        );
                        if adj {
                            pr == pl + 1
                        } else {
                            pl < pr
                        }
                    })
                })
                .collect();
            if orders.is_empty() {
                stats.eliminate("prec");
                return;
            }
            per_parent.push(orders);
        }
        let mut choice = vec![0usize; k];
        loop {
            stats.identifications_tried += 1;
            let ordered: Vec<&Vec<usize>> = (0..k).map(|p| &per_parent[p][choice[p]]).collect();
            out.push(self.model(root, &ordered, cells));
            let mut p = 0;
            loop {
                if p == k {
                    return;
                }
                choice[p] += 1;
                if choice[p] < per_parent[p].len() {
                    break;
                }
                choice[p] = 0;
                p += 1;
            }
        }
    }

    fn model(&self, root: usize, children: &[&Vec<usize>], cells: &[Vec<usize>]) -> Model {
        let mut m = Model {
            cells: Vec::new(),
            parent: Vec::new(),
        };
        let mut stack = vec![(root, None)];
        while let Some((c, p)) = stack.pop() {
            let idx = m.cells.len();
            let mut vars: Vec<u32> = cells[c]
                .iter()
                .flat_map(|&u| self.units[u].iter().map(|&i| self.vars[i]))
                .collect();
            vars.sort();
            m.cells.push(vars);
            m.parent.push(p);
            for &child in children[c].iter().rev() {
                stack.push((child, Some(idx)));
            }
        }
        m
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Variables that never label a node but are equated with one are renamed
/// to that node, so `?x = ?n` works as an alias.
fn dealias(d: &FlatDescription) -> Cow<'_, FlatDescription> {
    let loose = |v: &u32| !d.nodes.contains_key(v);
    if !d.constraints.iter().any(|c| loose(&c.lhs) || loose(&c.rhs)) {
        return Cow::Borrowed(d);
    }
    let mut parent: BTreeMap<u32, u32> = BTreeMap::new();
    fn find(parent: &BTreeMap<u32, u32>, mut v: u32) -> u32 {
        while let Some(&p) = parent.get(&v) {
            v = p;
        }
        v
    }
    for c in d.constraints.iter().filter(|c| c.op == RelOp::Eq) {
        let (a, b) = (find(&parent, c.lhs), find(&parent, c.rhs));
        if a == b || !(loose(&a) || loose(&b)) {
            continue;
        }
        // a node variable stays the representative
        let (keep, drop) = if loose(&a) { (b, a) } else { (a, b) };
        parent.insert(drop, keep);
    }
    let mut out = d.clone();
    out.constraints = d
        .constraints
        .iter()
        .map(|c| Constraint::new(find(&parent, c.lhs), c.op, find(&parent, c.rhs)))
        .filter(|c| !(c.op == RelOp::Eq && c.lhs == c.rhs))
        .collect();
    Cow::Owned(out)
}

fn check_dominance_cycles(d: &FlatDescription) -> Result<(), SolveError> {
    let mut edges: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for c in &d.constraints {
        if matches!(c.op, RelOp::Idom | RelOp::Dom) {
            if c.lhs == c.rhs {
                return Err(SolveError::IllFormedDescription {
                    reason: format!("?{} dominates itself", c.lhs),
                });
            }
            edges.entry(c.lhs).or_default().push(c.rhs);
        }
    }
    fn visit(
        v: u32,
        edges: &BTreeMap<u32, Vec<u32>>,
        state: &mut BTreeMap<u32, u8>,
        stack: &mut Vec<u32>,
    ) -> Result<(), SolveError> {
        state.insert(v, 1);
        stack.push(v);
        for &w in edges.get(&v).into_iter().flatten() {
            match state.get(&w) {
                Some(1) => {
                    let from = stack.iter().position(|&x| x == w).unwrap();
                    let cycle: Vec<String> = stack[from..].iter().map(|x| format!("?{x}")).collect();
                    return Err(SolveError::IllFormedDescription {
                        reason: format!("dominance cycle {} -> ?{w}", cycle.join(" -> ")),
                    });
                }
                Some(_) => {}
                None => visit(w, edges, state, stack)?,
            }
        }
        stack.pop();
        state.insert(v, 2);
        Ok(())
    }
    let mut state = BTreeMap::new();
    for &v in edges.keys() {
        if !state.contains_key(&v) {
            visit(v, &edges, &mut state, &mut Vec::new())?;
        }
    }
    Ok(())
}

/// Builds the template of a model; feature variables are renumbered.
pub fn template_of(d: &FlatDescription, m: &Model) -> Option<TreeTemplate> {
    let mut env = d.env.clone();
    let mut nodes = Vec::with_capacity(m.cells.len());
    for (i, vars) in m.cells.iter().enumerate() {
        let mut info: Option<CellInfo> = None;
        let (mut top, mut bot) = (FeatureStructure::new(), FeatureStructure::new());
        for v in vars {
            let n = &d.nodes[v];
            let mine = CellInfo {
                cat: n.cat.clone(),
                mark: n.mark,
                name: n.name.clone(),
            };
            info = Some(match info {
                None => mine,
                Some(prev) => prev.merge(&mine)?,
            });
            top = unify_in_place(&top, &n.top, &mut env).ok()?;
            bot = unify_in_place(&bot, &n.bot, &mut env).ok()?;
        }
        let info = info?;
        nodes.push(TemplateNode {
            id: i,
            cat: info.cat?,
            mark: info.mark,
            top,
            bot,
            name: info.name,
            parent: m.parent[i],
            children: Vec::new(),
            lex: None,
        });
    }
    for i in 0..nodes.len() {
        if let Some(p) = nodes[i].parent {
            nodes[p].children.push(i);
        }
    }
    for n in &mut nodes {
        n.top = resolve(&n.top, &env);
        n.bot = resolve(&n.bot, &env);
    }
    let kind = if nodes.iter().any(|n| n.mark == Mark::Foot) {
        TreeKind::Auxiliary
    } else {
        TreeKind::Initial
    };
    let mut t = TreeTemplate {
        id: String::new(),
        family: String::new(),
        kind,
        nodes,
        iface: resolve(&d.iface, &env),
        provenance: d.provenance.clone(),
    };
    t.renumber_vars();
    Some(t)
}

/// Minimal-model templates of one description, in canonical order.
pub fn solve(d: &FlatDescription) -> Result<Vec<TreeTemplate>, SolveError> {
    Ok(solve_with_stats(d, DEFAULT_MAX_VARIABLES)?.0)
}

pub fn solve_with_stats(
    d: &FlatDescription,
    max_variables: usize,
) -> Result<(Vec<TreeTemplate>, ModelStatistics), SolveError> {
    let (models, stats) = solve_models(d, max_variables)?;
    let mut seen = BTreeMap::new();
    for m in &models {
        if let Some(t) = template_of(d, m) {
            seen.entry(t.canonical()).or_insert(t);
        }
    }
    Ok((seen.into_values().collect(), stats))
}

/// Compiles every description of `family` and deduplicates the templates.
pub fn compile_family(family: &str, grammar: &Grammar) -> Result<Vec<TreeTemplate>, SolveError> {
    Ok(compile_family_with(family, grammar, SolverCaps::default())?.0)
}

pub fn compile_family_with(
    family: &str,
    grammar: &Grammar,
    caps: SolverCaps,
) -> Result<(Vec<TreeTemplate>, ModelStatistics), SolveError> {
    let descs = grammar.expand_with_cap(family, caps.max_descriptions)?;
    let solved: Vec<Result<(Vec<TreeTemplate>, ModelStatistics), SolveError>> = descs
        .par_iter()
        .map(|d| solve_with_stats(d, caps.max_variables))
        .collect();
    let mut stats = ModelStatistics::default();
    let mut seen: BTreeMap<String, TreeTemplate> = BTreeMap::new();
    for r in solved {
        let (ts, st) = r?;
        stats.absorb(&st);
        for t in ts {
            seen.entry(t.canonical()).or_insert(t);
        }
    }
    let mut out: Vec<TreeTemplate> = seen.into_values().collect();
    for (i, t) in out.iter_mut().enumerate() {
        t.family = family.to_string();
        t.id = format!("{family}#{i}");
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_metagrammar;

    fn grammar(src: &str) -> Grammar {
        Grammar::new(parse_metagrammar(src).unwrap()).unwrap()
    }

    fn shapes(ts: &[TreeTemplate]) -> Vec<String> {
        ts.iter().map(|t| t.shape()).collect()
    }

    const FRAGMENTS: &str = r#"
class CanSubject export ?S ?VN declare ?S ?VN {
  <syn>{ node ?S [cat=s] { node [cat=n, mark=subst, func=subj] node ?VN [cat=vn] } } }
class Active export ?S ?VN ?V declare ?S ?VN ?V {
  <syn>{ node ?S [cat=s] { node ?VN [cat=vn] { node ?V [cat=v, mark=anchor] } } } }
class CanObject export ?S ?VN declare ?S ?VN {
  <syn>{ node ?S [cat=s] { node ?VN [cat=vn] node [cat=n, mark=subst, func=obj] } } }
class CliticObject export ?VN ?V declare ?VN ?V {
  <syn>{ node ?VN [cat=vn] { node [cat=cl, mark=subst] node ?V [cat=v] } } }
class Canonical declare ?S ?VN ?V { CanSubject[] ; Active[] ; CanObject[] }
class Clitic declare ?S ?VN ?V { CanSubject[] ; Active[] ; CliticObject[] }
"#;

    #[test]
    fn canonical_transitive() {
        let g = grammar(FRAGMENTS);
        let ts = compile_family("Canonical", &g).unwrap();
        assert_eq!(shapes(&ts), vec!["S(N↓ VN(V⋄) N↓)"]);
        assert_eq!(ts[0].id, "Canonical#0");
        assert_eq!(ts[0].kind, TreeKind::Initial);
    }

    #[test]
    fn clitic_directly_precedes_verb() {
        let g = grammar(FRAGMENTS);
        assert_eq!(shapes(&compile_family("Clitic", &g).unwrap()), vec!["S(N↓ VN(CL↓ V⋄))"]);
    }

    #[test]
    fn cat_clash_under_eq_is_empty() {
        let g = grammar("class A declare ?X ?Y { <syn>{ node ?X [cat=n, mark=anchor] node ?Y [cat=v] ?X = ?Y } }");
        let d = &g.expand("A").unwrap()[0];
        let (models, stats) = solve_models(d, 12).unwrap();
        assert!(models.is_empty());
        assert_eq!(stats.eliminated_by.get("eq-clash"), Some(&1));
    }

    #[test]
    fn free_siblings_give_all_orders() {
        let g = grammar(
            "class A declare ?R ?X ?Y { <syn>{ node ?R [cat=s] node ?X [cat=a, mark=anchor] node ?Y [cat=b, mark=subst] ?R -> ?X ?R -> ?Y } }",
        );
        let ts = compile_family("A", &g).unwrap();
        assert_eq!(shapes(&ts), vec!["S(A⋄ B↓)", "S(B↓ A⋄)"]);
    }

    #[test]
    fn minimality_prefers_identification() {
        // Two vn nodes with no constraint keeping them apart collapse into one.
        let g = grammar(
            "class A declare ?R ?X ?Y ?V { <syn>{ node ?R [cat=s] { node ?X [cat=vn] } node ?Y [cat=vn] { node ?V [cat=v, mark=anchor] } ?R ->* ?Y } }",
        );
        assert_eq!(shapes(&compile_family("A", &g).unwrap()), vec!["S(VN(V⋄))"]);
    }

    #[test]
    fn auxiliary_needs_matching_foot() {
        let g = grammar(
            "class Aux { <syn>{ node [cat=vn] { node [cat=v, mark=anchor] node [cat=vn, mark=foot] } } }
             class Bad { <syn>{ node [cat=vn] { node [cat=v, mark=anchor] node [cat=n, mark=foot] } } }",
        );
        let ts = compile_family("Aux", &g).unwrap();
        assert_eq!(ts[0].kind, TreeKind::Auxiliary);
        assert_eq!(ts[0].shape(), "VN(V⋄ VN*)");
        assert!(compile_family("Bad", &g).unwrap().is_empty());
    }

    #[test]
    fn dominance_cycle_is_ill_formed() {
        let g = grammar("class A declare ?X ?Y { <syn>{ node ?X [cat=s] node ?Y [cat=v, mark=anchor] ?X -> ?Y ?Y ->* ?X } }");
        let d = &g.expand("A").unwrap()[0];
        assert!(matches!(solve(d), Err(SolveError::IllFormedDescription { .. })));
    }

    #[test]
    fn variable_cap() {
        let mut src = String::from("class A { <syn>{ node [cat=s] {");
        for _ in 0..12 {
            src.push_str(" node [cat=n]");
        }
        src.push_str(" node [cat=v, mark=anchor] } } }");
        let g = grammar(&src);
        let d = &g.expand("A").unwrap()[0];
        assert_eq!(
            solve(d).unwrap_err(),
            SolveError::TooManyVariables { count: 14, cap: 12 }
        );
    }

    #[test]
    fn features_block_identification() {
        let src = "class A declare ?VN { <syn>{ node ?VN [cat=vn] { node [cat=cl, mark=subst, case=nom] node [cat=v, mark=anchor] } } ; <syn>{ node ?VN [cat=vn] { node [cat=cl, mark=subst, case=acc] } } }";
        let ts = compile_family("A", &grammar(src)).unwrap();
        assert_eq!(shapes(&ts).len(), 3);
        assert!(ts.iter().all(|t| t.nodes.len() == 4));
        let plain = src.replace(", case=nom", "").replace(", case=acc", "");
        assert_eq!(shapes(&compile_family("A", &grammar(&plain)).unwrap()), vec!["VN(CL↓ V⋄)"]);
    }

    #[test]
    fn deterministic() {
        let g = grammar(FRAGMENTS);
        let a: Vec<String> = compile_family("Clitic", &g).unwrap().iter().map(|t| t.canonical()).collect();
        let b: Vec<String> = compile_family("Clitic", &g).unwrap().iter().map(|t| t.canonical()).collect();
        assert_eq!(a, b);
    }
}
