//! Derivation trees read off the chart's backpointers, checked for feature
//! consistency and rendered.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use super::chart::{Back, Chart};
use crate::dsl::Mark;
use crate::featstruct::{unify_in_place, BindingEnv, FeatureStructure, FeatureValue, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Op {
    Subst { inst: u32, node: u16, child: u32 },
    Adjoin { inst: u32, node: u16, aux: u32 },
    Coanchor { inst: u32, node: u16, pos: u8 },
}

pub(crate) struct Enumerator<'c, 'a> {
    chart: &'c Chart<'a>,
    memo: HashMap<usize, Rc<Vec<Vec<Op>>>>,
    cap: usize,
    pub truncated: bool,
}

impl<'c, 'a> Enumerator<'c, 'a> {
    pub fn new(chart: &'c Chart<'a>, cap: usize) -> Self {
        Enumerator { chart, memo: HashMap::new(), cap, truncated: false }
    }

    fn product(&mut self, a: &[Vec<Op>], b: &[Vec<Op>], extra: Option<Op>, out: &mut Vec<Vec<Op>>) {
        for x in a {
            for y in b {
                if out.len() >= self.cap {
                    self.truncated = true;
                    return;
                }
                let mut v = Vec::with_capacity(x.len() + y.len() + 1);
                v.extend_from_slice(x);
                v.extend_from_slice(y);
                v.extend(extra);
                out.push(v);
            }
        }
    }

    /// All operation lists deriving item `x`.
    pub fn ops(&mut self, x: usize) -> Rc<Vec<Vec<Op>>> {
        if let Some(r) = self.memo.get(&x) {
            return r.clone();
        }
        let it = self.chart.items[x];
        let unit = [Vec::new()];
        let mut out = Vec::new();
        for back in self.chart.backs[x].clone() {
            match back {
                Back::Leaf => out.push(Vec::new()),
                Back::Coanchor(pos) => out.push(vec![Op::Coanchor { inst: it.inst, node: it.node, pos }]),
                Back::Subst(r) => {
                    let child = self.chart.items[r].inst;
                    let sub = self.ops(r);
                    let op = Op::Subst { inst: it.inst, node: it.node, child };
                    self.product(&sub, &unit, Some(op), &mut out);
                }
                Back::Null(b) | Back::First(b) | Back::Complete(b) => {
                    let sub = self.ops(b);
                    self.product(&sub, &unit, None, &mut out);
                }
                Back::Adjoin { bot, aux } => {
                    let op = Op::Adjoin { inst: it.inst, node: it.node, aux: self.chart.items[aux].inst };
                    let (a, b) = (self.ops(bot), self.ops(aux));
                    self.product(&a, &b, Some(op), &mut out);
                }
                Back::Next { dot, child } => {
                    let (a, b) = (self.ops(dot), self.ops(child));
                    self.product(&a, &b, None, &mut out);
                }
            }
        }
        let r = Rc::new(out);
        self.memo.insert(x, r.clone());
        r
    }
}

/// One complete derivation: a root instance and the operations below it.
pub(crate) struct Assembled<'c, 'a> {
    chart: &'c Chart<'a>,
    root: u32,
    subst: BTreeMap<(u32, u16), u32>,
    adjoin: BTreeMap<(u32, u16), u32>,
    coanchor: BTreeMap<(u32, u16), u8>,
    host: HashMap<u32, (u32, u16)>,
}

impl<'c, 'a> Assembled<'c, 'a> {
    pub fn new(chart: &'c Chart<'a>, root: u32, ops: &[Op]) -> Self {
        let mut a = Assembled {
            chart,
            root,
            subst: BTreeMap::new(),
            adjoin: BTreeMap::new(),
            coanchor: BTreeMap::new(),
            host: HashMap::new(),
        };
        for op in ops {
            match *op {
                Op::Subst { inst, node, child } => {
                    a.subst.insert((inst, node), child);
                }
                Op::Adjoin { inst, node, aux } => {
                    a.adjoin.insert((inst, node), aux);
                    a.host.insert(aux, (inst, node));
                }
                Op::Coanchor { inst, node, pos } => {
                    a.coanchor.insert((inst, node), pos);
                }
            }
        }
        a
    }

    fn inst(&self, t: u32) -> &'a crate::anchoring::AnchoredTree {
        self.chart.insts[t as usize].tree
    }

    /// Instances in the derivation, root first then by index.
    pub fn instances(&self) -> Vec<u32> {
        let mut set: BTreeSet<u32> = self.subst.values().chain(self.adjoin.values()).copied().collect();
        set.remove(&self.root);
        std::iter::once(self.root).chain(set).collect()
    }

    /// Unifies along every substitution and adjunction, then top with bottom
    /// at every node of the derived tree.
    pub fn features_ok(&self) -> bool {
        let insts = self.instances();
        let mut env = BindingEnv::new();
        let mut slot_of: HashMap<(u32, u16), usize> = HashMap::new();
        let mut fs: Vec<FeatureStructure> = Vec::new();
        let mut base = 0u32;
        for &t in &insts {
            let tree = &self.inst(t).tree;
            let rename = |f: &FeatureStructure| f.map_vars(|v| FeatureValue::Var(VarId(v.0 + base)));
            slot_of.insert((t, 0), fs.len());
            for n in &tree.nodes {
                for side in [&n.top, &n.bot] {
                    let r = rename(side);
                    env.register_all(&r);
                    fs.push(r);
                }
            }
            base += tree.max_var().map_or(0, |m| m + 1);
        }
        let slot = |t: u32, node: u16, bot: bool| slot_of[&(t, 0)] + 2 * node as usize + bot as usize;
        let mut parent: Vec<usize> = (0..fs.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut merge = |a: usize, b: usize, env: &mut BindingEnv| -> bool {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return true;
            }
            match unify_in_place(&fs[ra], &fs[rb], env) {
                Ok(u) => {
                    fs[ra] = u;
                    parent[rb] = ra;
                    true
                }
                Err(_) => false,
            }
        };
        for (&(t, k), &c) in &self.subst {
            if !merge(slot(t, k, false), slot(c, 0, false), &mut env) || !merge(slot(t, k, true), slot(c, 0, true), &mut env) {
                return false;
            }
        }
        for (&(t, k), &a) in &self.adjoin {
            let foot = self.inst(a).tree.foot().expect("auxiliary tree has a foot") as u16;
            if !merge(slot(t, k, false), slot(a, 0, false), &mut env) || !merge(slot(t, k, true), slot(a, foot, true), &mut env) {
                return false;
            }
        }
        for &t in &insts {
            for (k, n) in self.inst(t).tree.nodes.iter().enumerate() {
                let k = k as u16;
                if n.mark == Mark::Subst || self.adjoin.contains_key(&(t, k)) {
                    continue;
                }
                if !merge(slot(t, k, false), slot(t, k, true), &mut env) {
                    return false;
                }
            }
        }
        true
    }

    /// Bracketed derived tree, e.g. `(S (N Jean) (VN (V dort)))`.
    pub fn derived(&self) -> String {
        let mut s = String::new();
        self.render(self.root, 0, false, &mut s);
        s
    }

    fn render(&self, t: u32, k: u16, adjoined: bool, out: &mut String) {
        if !adjoined {
            if let Some(&a) = self.adjoin.get(&(t, k)) {
                return self.render(a, 0, false, out);
            }
        }
        let n = &self.inst(t).tree.nodes[k as usize];
        match n.mark {
            Mark::Foot => {
                let (h, hk) = self.host[&t];
                return self.render(h, hk, true, out);
            }
            Mark::Subst => return self.render(self.subst[&(t, k)], 0, false, out),
            _ => {}
        }
        out.push('(');
        out.push_str(&n.cat.as_str().to_uppercase());
        if let Some(w) = &n.lex {
            out.push(' ');
            out.push_str(w);
        }
        for &c in &n.children {
            out.push(' ');
            self.render(t, c as u16, false, out);
        }
        out.push(')');
    }

    /// Derivation tree, e.g. `dormir:n0V#0@2(0:sub jean:propn#0@1)`.
    pub fn derivation(&self) -> String {
        let mut s = String::new();
        self.describe(self.root, &mut s);
        s
    }

    fn describe(&self, t: u32, out: &mut String) {
        let a = self.inst(t);
        out.push_str(&format!("{}:{}@{}", a.lemma_id, a.template, self.chart.insts[t as usize].pos + 1));
        let mut parts: Vec<(u16, String)> = Vec::new();
        for (&(h, k), &c) in &self.subst {
            if h == t {
                let mut s = format!("{k}:sub ");
                self.describe(c, &mut s);
                parts.push((k, s));
            }
        }
        for (&(h, k), &x) in &self.adjoin {
            if h == t {
                let mut s = format!("{k}:adj ");
                self.describe(x, &mut s);
                parts.push((k, s));
            }
        }
        for (&(h, k), &p) in &self.coanchor {
            if h == t {
                parts.push((k, format!("{k}:co@{}", p + 1)));
            }
        }
        if !parts.is_empty() {
            parts.sort();
            let body: Vec<String> = parts.into_iter().map(|(_, s)| s).collect();
            out.push('(');
            out.push_str(&body.join(", "));
            out.push(')');
        }
    }

    /// MWE lemma ids with the 1-based positions of their anchor and coanchors.
    pub fn mwe_spans(&self) -> Vec<(String, BTreeSet<usize>)> {
        let mut out = Vec::new();
        for t in self.instances() {
            let a = self.inst(t);
            if !a.is_mwe {
                continue;
            }
            let mut span = BTreeSet::from([self.chart.insts[t as usize].pos + 1]);
            span.extend(self.coanchor.iter().filter(|((h, _), _)| *h == t).map(|(_, &p)| p as usize + 1));
            out.push((a.lemma_id.clone(), span));
        }
        out.sort();
        out
    }
}
