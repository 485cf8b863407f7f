//! Brute-force minimal models: every set partition of the node variables,
//! every rooted tree over the cells and every sibling order, filtered by the
//! constraints. Slow, but obviously complete for a handful of variables.

use std::collections::{BTreeMap, BTreeSet};

use metagramme::dsl::{Mark, RelOp};
use metagramme::featstruct::{unify_in_place, Atom, BindingEnv, FeatureStructure, FeatureValue, VarId};
use metagramme::resolver::{Constraint, DescNode, FlatDescription};
use metagramme::treesolver::Model;
use proptest::prelude::*;

fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    // restricted growth strings: block index of each element
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fn rec(i: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max + 1 {
            if i == 0 && b > 0 {
                break;
            }
            cur[i] = b;
            rec(i + 1, max.max(b), cur, out);
        }
    }
    if n == 0 {
        return vec![Vec::new()];
    }
    rec(0, 0, &mut cur, &mut out);
    out
}

struct Cells {
    members: Vec<Vec<u32>>,
    cat: Vec<Option<Atom>>,
    mark: Vec<Mark>,
}

fn build_cells(d: &FlatDescription, vars: &[u32], block: &[usize]) -> Option<Cells> {
    let k = block.iter().max().map_or(0, |m| m + 1);
    let mut members = vec![Vec::new(); k];
    for (i, &b) in block.iter().enumerate() {
        members[b].push(vars[i]);
    }
    let mut cat = vec![None; k];
    let mut mark = vec![Mark::None; k];
    let mut name: Vec<Option<String>> = vec![None; k];
    let mut env = d.env.clone();
    for c in 0..k {
        let (mut top, mut bot) = (FeatureStructure::new(), FeatureStructure::new());
        for v in &members[c] {
            let n = &d.nodes[v];
            if let Some(x) = &n.cat {
                if cat[c].as_ref().is_some_and(|y| y != x) {
                    return None;
                }
                cat[c] = Some(x.clone());
            }
            if n.mark != Mark::None {
                if mark[c] != Mark::None && mark[c] != n.mark {
                    return None;
                }
                mark[c] = n.mark;
            }
            if let Some(x) = &n.name {
                if name[c].as_ref().is_some_and(|y| y != x) {
                    return None;
                }
                name[c] = Some(x.clone());
            }
            top = unify_in_place(&top, &n.top, &mut env).ok()?;
            bot = unify_in_place(&bot, &n.bot, &mut env).ok()?;
        }
    }
    if cat.iter().any(Option::is_none) {
        return None;
    }
    if mark.iter().filter(|&&m| m == Mark::Anchor).count() != 1 || mark.iter().filter(|&&m| m == Mark::Foot).count() > 1 {
        return None;
    }
    Some(Cells { members, cat, mark })
}

fn permutations(xs: &[usize]) -> Vec<Vec<usize>> {
    if xs.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..xs.len() {
        let mut rest = xs.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

struct Shape<'a> {
    parent: &'a [Option<usize>],
    children: &'a [Vec<usize>],
}

impl Shape<'_> {
    fn ancestors(&self, mut c: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while let Some(p) = self.parent[c] {
            out.push(p);
            c = p;
        }
        out
    }

    fn dominates(&self, a: usize, b: usize) -> bool {
        self.ancestors(b).contains(&a)
    }

    /// Preorder position of every cell.
    fn preorder(&self, root: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![root];
        while let Some(c) = stack.pop() {
            out.push(c);
            stack.extend(self.children[c].iter().rev());
        }
        out
    }

    fn precedes(&self, a: usize, b: usize, root: usize) -> bool {
        if a == b || self.dominates(a, b) || self.dominates(b, a) {
            return false;
        }
        let order = self.preorder(root);
        order.iter().position(|&x| x == a) < order.iter().position(|&x| x == b)
    }

    fn holds(&self, c: &Constraint, cell: &BTreeMap<u32, usize>, root: usize) -> bool {
        let (a, b) = (cell[&c.lhs], cell[&c.rhs]);
        match c.op {
            RelOp::Eq => a == b,
            RelOp::Idom => self.parent[b] == Some(a),
            RelOp::Dom => a != b && self.dominates(a, b),
            RelOp::Prec => self.precedes(a, b, root),
            RelOp::Iprec => {
                a != b
                    && self.parent[a].is_some()
                    && self.parent[a] == self.parent[b]
                    && {
                        let sibs = &self.children[self.parent[a].unwrap()];
                        let i = sibs.iter().position(|&x| x == a).unwrap();
                        sibs.get(i + 1) == Some(&b)
                    }
            }
        }
    }
}

fn models_of(d: &FlatDescription, cells: &Cells, out: &mut BTreeSet<Model>) {
    let k = cells.members.len();
    let cell: BTreeMap<u32, usize> = cells
        .members
        .iter()
        .enumerate()
        .flat_map(|(c, vs)| vs.iter().map(move |&v| (v, c)))
        .collect();
    // parent choice per cell: k means "root"
    let mut choice = vec![0usize; k];
    loop {
        let roots: Vec<usize> = (0..k).filter(|&c| choice[c] == k).collect();
        let ok_shape = roots.len() == 1 && (0..k).all(|c| choice[c] != c);
        if ok_shape {
            let parent: Vec<Option<usize>> = choice.iter().map(|&p| (p < k).then_some(p)).collect();
            let root = roots[0];
            let acyclic = (0..k).all(|c| {
                let mut cur = c;
                let mut steps = 0;
                while let Some(p) = parent[cur] {
                    cur = p;
                    steps += 1;
                    if steps > k {
                        return false;
                    }
                }
                cur == root
            });
            let leaves_ok = (0..k).all(|c| cells.mark[c] == Mark::None || !parent.contains(&Some(c)));
            let foot_ok = (0..k).all(|c| cells.mark[c] != Mark::Foot || cells.cat[c] == cells.cat[root]);
            if acyclic && leaves_ok && foot_ok {
                let kids: Vec<Vec<usize>> = (0..k).map(|p| (0..k).filter(|&c| parent[c] == Some(p)).collect()).collect();
                let orders: Vec<Vec<Vec<usize>>> = kids.iter().map(|ks| permutations(ks)).collect();
                let mut pick = vec![0usize; k];
                loop {
                    let children: Vec<Vec<usize>> = (0..k).map(|p| orders[p][pick[p]].clone()).collect();
                    let shape = Shape { parent: &parent, children: &children };
                    if d.constraints.iter().all(|c| shape.holds(c, &cell, root)) {
                        out.insert(to_model(&shape, root, cells));
                    }
                    if !advance(&mut pick, |p| orders[p].len()) {
                        break;
                    }
                }
            }
        }
        if !advance(&mut choice, |_| k + 1) {
            break;
        }
    }
}

fn advance(digits: &mut [usize], base: impl Fn(usize) -> usize) -> bool {
    for (p, d) in digits.iter_mut().enumerate() {
        *d += 1;
        if *d < base(p) {
            return true;
        }
        *d = 0;
    }
    false
}

fn to_model(shape: &Shape, root: usize, cells: &Cells) -> Model {
    let order = shape.preorder(root);
    let index: BTreeMap<usize, usize> = order.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut m = Model { cells: Vec::new(), parent: Vec::new() };
    for &c in &order {
        let mut vs = cells.members[c].clone();
        vs.sort();
        m.cells.push(vs);
        m.parent.push(shape.parent[c].map(|p| index[&p]));
    }
    m
}

/// Minimal models by exhaustive search.
/// Replaces variables that are not nodes by a node they are equated with,
/// keeping the other equated nodes identified. `None` if such a variable
/// reaches no node.
fn without_aliases(d: &FlatDescription) -> Option<FlatDescription> {
    let loose = |v: u32| !d.nodes.contains_key(&v);
    let mut eqs: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for c in d.constraints.iter().filter(|c| c.op == RelOp::Eq) {
        eqs.entry(c.lhs).or_default().push(c.rhs);
        eqs.entry(c.rhs).or_default().push(c.lhs);
    }
    let mut rep: BTreeMap<u32, u32> = BTreeMap::new();
    let mut extra = Vec::new();
    for v in d.constraints.iter().flat_map(|c| [c.lhs, c.rhs]).filter(|&v| loose(v)) {
        if rep.contains_key(&v) {
            continue;
        }
        // nodes reachable from v through variables that are not nodes
        let (mut seen, mut stack, mut nodes) = (BTreeSet::from([v]), vec![v], BTreeSet::new());
        while let Some(x) = stack.pop() {
            for &y in eqs.get(&x).into_iter().flatten() {
                if !loose(y) {
                    nodes.insert(y);
                } else if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        let &first = nodes.iter().next()?;
        extra.extend(nodes.iter().skip(1).map(|&n| Constraint::new(first, RelOp::Eq, n)));
        for x in seen {
            rep.insert(x, first);
        }
    }
    let map = |v: u32| rep.get(&v).copied().unwrap_or(v);
    let mut out = d.clone();
    out.constraints = d
        .constraints
        .iter()
        .map(|c| Constraint::new(map(c.lhs), c.op, map(c.rhs)))
        .chain(extra)
        .filter(|c| !(c.op == RelOp::Eq && c.lhs == c.rhs))
        .collect();
    Some(out)
}

pub fn brute_force(d: &FlatDescription) -> BTreeSet<Model> {
    let Some(d) = without_aliases(d) else {
        return BTreeSet::new();
    };
    let d = &d;
    let vars: Vec<u32> = d.nodes.keys().copied().collect();
    if d.constraints.iter().any(|c| !d.nodes.contains_key(&c.lhs) || !d.nodes.contains_key(&c.rhs)) {
        return BTreeSet::new();
    }
    let mut by_size: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    for p in set_partitions(vars.len()) {
        let k = p.iter().max().map_or(0, |m| m + 1);
        by_size.entry(k).or_default().push(p);
    }
    for parts in by_size.values() {
        let mut found = BTreeSet::new();
        for p in parts {
            if let Some(cells) = build_cells(d, &vars, p) {
                models_of(d, &cells, &mut found);
            }
        }
        if !found.is_empty() {
            return found;
        }
    }
    BTreeSet::new()
}

fn node_strategy() -> impl Strategy<Value = DescNode> {
    let cat = prop_oneof![4 => Just(Some("a")), 4 => Just(Some("b")), 1 => Just(None)];
    let mark = prop_oneof![
        6 => Just(Mark::None),
        3 => Just(Mark::Anchor),
        2 => Just(Mark::Subst),
        1 => Just(Mark::Foot),
        1 => Just(Mark::Coanchor),
    ];
    let feat = prop_oneof![
        3 => Just(None),
        1 => Just(Some(FeatureValue::atom("p"))),
        1 => Just(Some(FeatureValue::atom("m"))),
        1 => Just(Some(FeatureValue::Var(VarId(1)))),
    ];
    let name = prop_oneof![5 => Just(None), 1 => Just(Some("X".to_string()))];
    (cat, mark, feat.clone(), feat, name).prop_map(|(cat, mark, top, bot, name)| {
        let fs = |v: Option<FeatureValue>| {
            let mut f = FeatureStructure::new();
            if let Some(v) = v {
                f.insert("f", v);
            }
            f
        };
        DescNode { cat: cat.map(|c| Atom::new(c).unwrap()), mark, top: fs(top), bot: fs(bot), name }
    })
}

fn op_strategy() -> impl Strategy<Value = RelOp> {
    prop_oneof![5 => Just(RelOp::Idom), 1 => Just(RelOp::Dom), 3 => Just(RelOp::Iprec), 1 => Just(RelOp::Prec), 1 => Just(RelOp::Eq)]
}

/// Random descriptions with 1 to `max_vars` node variables.
pub fn description(max_vars: usize) -> impl Strategy<Value = FlatDescription> {
    (1..=max_vars)
        .prop_flat_map(|n| {
            let cons = proptest::collection::vec((0..n, op_strategy(), 0..n), 0..=n + 1);
            (proptest::collection::vec(node_strategy(), n), cons)
        })
        .prop_map(|(nodes, cons)| {
            let mut env = BindingEnv::new();
            env.register(VarId(1));
            FlatDescription {
                nodes: nodes.into_iter().enumerate().map(|(i, n)| (i as u32 + 1, n)).collect(),
                constraints: cons
                    .into_iter()
                    .filter(|(a, _, b)| a != b)
                    .map(|(a, op, b)| Constraint::new(a as u32 + 1, op, b as u32 + 1))
                    .collect(),
                iface: FeatureStructure::new(),
                env,
                provenance: Vec::new(),
            }
        })
}

/// Checks a finished model against every constraint of its description.
pub fn satisfies(d: &FlatDescription, m: &Model) -> Result<(), String> {
    let k = m.cells.len();
    let mut cell: BTreeMap<u32, usize> =
        m.cells.iter().enumerate().flat_map(|(c, vs)| vs.iter().map(move |&v| (v, c))).collect();
    if cell.len() != d.nodes.len() || d.nodes.keys().any(|v| !cell.contains_key(v)) {
        return Err("model does not cover the node variables".into());
    }
    // variables without a node are aliases of the node they are equated with
    loop {
        let before = cell.len();
        for c in d.constraints.iter().filter(|c| c.op == RelOp::Eq) {
            match (cell.get(&c.lhs).copied(), cell.get(&c.rhs).copied()) {
                (Some(x), None) => {
                    cell.insert(c.rhs, x);
                }
                (None, Some(x)) => {
                    cell.insert(c.lhs, x);
                }
                _ => {}
            }
        }
        if cell.len() == before {
            break;
        }
    }
    let roots: Vec<usize> = (0..k).filter(|&c| m.parent[c].is_none()).collect();
    if roots != [0] {
        return Err(format!("roots {roots:?}"));
    }
    let children: Vec<Vec<usize>> = (0..k).map(|p| (0..k).filter(|&c| m.parent[c] == Some(p)).collect()).collect();
    let shape = Shape { parent: &m.parent, children: &children };
    for c in &d.constraints {
        if !shape.holds(c, &cell, 0) {
            return Err(format!("violates ?{} {} ?{}", c.lhs, c.op.symbol(), c.rhs));
        }
    }
    Ok(())
}
