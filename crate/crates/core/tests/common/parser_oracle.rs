//! Generate-and-test derivations: top-down over every way of filling
//! substitution sites and optional adjunction sites with unused anchored
//! trees. Each candidate is built as an explicit derived tree, then kept if
//! it yields the sentence and its features unify. Output uses the parser's
//! derivation notation.

use std::collections::{BTreeMap, BTreeSet};

use metagramme::anchoring::AnchoredTree;
use metagramme::dsl::Mark;
use metagramme::featstruct::{unify_in_place, Atom, BindingEnv, FeatureStructure, FeatureValue, VarId};
use metagramme::treesolver::TreeKind;

#[derive(Clone, Default)]
struct Deriv {
    subst: BTreeMap<(usize, usize), usize>,
    adjoin: BTreeMap<(usize, usize), usize>,
    used: BTreeSet<usize>,
}

struct DNode {
    cat: String,
    word: Option<(usize, usize, String)>,
    top: FeatureStructure,
    bot: FeatureStructure,
    children: Vec<usize>,
    parent: Option<usize>,
    live: bool,
}

struct Arena {
    nodes: Vec<DNode>,
    map: BTreeMap<(usize, usize), usize>,
    env: BindingEnv,
    offset: u32,
}

impl Arena {
    fn replace(&mut self, old: usize, new: usize) {
        if let Some(p) = self.nodes[old].parent {
            for c in self.nodes[p].children.iter_mut() {
                if *c == old {
                    *c = new;
                }
            }
        }
        self.nodes[new].parent = self.nodes[old].parent;
        self.nodes[old].live = false;
    }

    fn unify(&mut self, a: &FeatureStructure, b: &FeatureStructure) -> Option<FeatureStructure> {
        unify_in_place(a, b, &mut self.env).ok()
    }

    fn render(&self, i: usize, out: &mut String, words: &mut Vec<(usize, usize, String)>) {
        let n = &self.nodes[i];
        out.push('(');
        out.push_str(&n.cat.to_uppercase());
        if let Some(w) = &n.word {
            out.push(' ');
            out.push_str(&w.2);
            words.push(w.clone());
        }
        for &c in &n.children {
            out.push(' ');
            self.render(c, out, words);
        }
        out.push(')');
    }
}

struct Search<'a> {
    insts: Vec<(usize, &'a AnchoredTree)>,
    tokens: Vec<String>,
    start: Atom,
    out: BTreeSet<(String, String)>,
}

impl Search<'_> {
    fn tree(&self, t: usize) -> &metagramme::treesolver::TreeTemplate {
        &self.insts[t].1.tree
    }

    fn extend(&mut self, d: Deriv, mut todo: Vec<(usize, usize)>) {
        let Some((t, k)) = todo.pop() else {
            self.finish(&d);
            return;
        };
        let node = &self.tree(t).nodes[k];
        let (mark, cat) = (node.mark, node.cat.clone());
        let wanted = match mark {
            Mark::Subst => TreeKind::Initial,
            Mark::Foot => return self.extend(d, todo),
            _ => TreeKind::Auxiliary,
        };
        for c in 0..self.insts.len() {
            let ct = self.tree(c);
            if d.used.contains(&c) || ct.kind != wanted || ct.nodes[0].cat != cat {
                continue;
            }
            let mut d2 = d.clone();
            d2.used.insert(c);
            if mark == Mark::Subst {
                d2.subst.insert((t, k), c);
            } else {
                d2.adjoin.insert((t, k), c);
            }
            let mut todo2 = todo.clone();
            todo2.extend((0..ct.nodes.len()).map(|n| (c, n)));
            self.extend(d2, todo2);
        }
        if mark != Mark::Subst {
            self.extend(d, todo);
        }
    }

    /// Copies instance `t` into the arena and applies the operations below
    /// it, children first. Returns the root of the resulting subtree.
    fn realize(&self, d: &Deriv, t: usize, a: &mut Arena) -> Option<usize> {
        let tree = self.tree(t);
        let base = a.nodes.len();
        let off = a.offset;
        a.offset += tree.max_var().map_or(0, |m| m + 1);
        let rename = |f: &FeatureStructure| f.map_vars(|v| FeatureValue::Var(VarId(v.0 + off)));
        for (k, n) in tree.nodes.iter().enumerate() {
            a.nodes.push(DNode {
                cat: n.cat.as_str().to_string(),
                word: n.lex.clone().map(|w| (t, k, w)),
                top: rename(&n.top),
                bot: rename(&n.bot),
                children: n.children.iter().map(|&c| base + c).collect(),
                parent: n.parent.map(|p| base + p),
                live: true,
            });
            a.map.insert((t, k), base + k);
        }
        let mut root = base;
        for k in 0..tree.nodes.len() {
            let site = a.map[&(t, k)];
            if let Some(&c) = d.subst.get(&(t, k)) {
                let r = self.realize(d, c, a)?;
                let top = a.unify(&a.nodes[r].top.clone(), &a.nodes[site].top.clone())?;
                let bot = a.unify(&a.nodes[r].bot.clone(), &a.nodes[site].bot.clone())?;
                (a.nodes[r].top, a.nodes[r].bot) = (top, bot);
                a.replace(site, r);
            }
            if let Some(&x) = d.adjoin.get(&(t, k)) {
                let r = self.realize(d, x, a)?;
                let foot = a.map[&(x, self.tree(x).foot().expect("auxiliary tree has a foot"))];
                let top = a.unify(&a.nodes[r].top.clone(), &a.nodes[site].top.clone())?;
                let bot = a.unify(&a.nodes[foot].bot.clone(), &a.nodes[site].bot.clone())?;
                a.nodes[r].top = top;
                a.nodes[foot].bot = bot;
                let kids = std::mem::take(&mut a.nodes[site].children);
                for &c in &kids {
                    a.nodes[c].parent = Some(foot);
                }
                a.nodes[foot].children = kids;
                a.nodes[foot].word = a.nodes[site].word.take();
                a.replace(site, r);
                if site == root {
                    root = r;
                }
            }
        }
        Some(root)
    }

    fn finish(&mut self, d: &Deriv) {
        let below: BTreeSet<usize> = d.subst.values().chain(d.adjoin.values()).copied().collect();
        let root = *d.used.iter().find(|u| !below.contains(u)).expect("one root");
        let mut a = Arena { nodes: Vec::new(), map: BTreeMap::new(), env: BindingEnv::new(), offset: 0 };
        let Some(top) = self.realize(d, root, &mut a) else { return };
        if a.nodes[top].cat != self.start.as_str() {
            return;
        }
        for i in 0..a.nodes.len() {
            if a.nodes[i].live && a.unify(&a.nodes[i].top.clone(), &a.nodes[i].bot.clone()).is_none() {
                return;
            }
        }
        let (mut bracket, mut words) = (String::new(), Vec::new());
        a.render(top, &mut bracket, &mut words);
        if words.len() != self.tokens.len() {
            return;
        }
        let mut co: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (i, (t, k, w)) in words.iter().enumerate() {
            if &self.tokens[i] != w {
                return;
            }
            match self.tree(*t).nodes[*k].mark {
                Mark::Anchor if self.insts[*t].0 != i => return,
                Mark::Coanchor => {
                    co.insert((*t, *k), i);
                }
                _ => {}
            }
        }
        let s = self.describe(d, root, &co);
        self.out.insert((s, bracket));
    }

    fn describe(&self, d: &Deriv, t: usize, co: &BTreeMap<(usize, usize), usize>) -> String {
        let (pos, tree) = self.insts[t];
        let mut s = format!("{}:{}@{}", tree.lemma_id, tree.template, pos + 1);
        let mut parts: Vec<(usize, String)> = Vec::new();
        for (&(h, k), &c) in &d.subst {
            if h == t {
                parts.push((k, format!("{k}:sub {}", self.describe(d, c, co))));
            }
        }
        for (&(h, k), &x) in &d.adjoin {
            if h == t {
                parts.push((k, format!("{k}:adj {}", self.describe(d, x, co))));
            }
        }
        for (&(h, k), &p) in co {
            if h == t {
                parts.push((k, format!("{k}:co@{}", p + 1)));
            }
        }
        if !parts.is_empty() {
            parts.sort();
            let body: Vec<String> = parts.into_iter().map(|(_, s)| s).collect();
            s.push('(');
            s.push_str(&body.join(", "));
            s.push(')');
        }
        s
    }
}

/// All `(derivation, derived tree)` pairs for `tokens`, given the trees each
/// token anchors.
pub fn derivations(tokens: &[&str], anchored: &[Vec<AnchoredTree>], start: &Atom) -> BTreeSet<(String, String)> {
    let insts: Vec<(usize, &AnchoredTree)> = anchored
        .iter()
        .enumerate()
        .flat_map(|(p, ts)| ts.iter().map(move |t| (p, t)))
        .collect();
    let mut s = Search {
        insts,
        tokens: tokens.iter().map(|t| t.to_string()).collect(),
        start: start.clone(),
        out: BTreeSet::new(),
    };
    for r in 0..s.insts.len() {
        if s.tree(r).kind != TreeKind::Initial {
            continue;
        }
        let d = Deriv { used: BTreeSet::from([r]), ..Default::default() };
        let todo = (0..s.tree(r).nodes.len()).map(|n| (r, n)).collect();
        s.extend(d, todo);
    }
    s.out
}
