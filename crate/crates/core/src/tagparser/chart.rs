//! Agenda-driven recognition over dotted tree-node items.
//!
//! Items are `Bot` (a node's children recognized), `Top` (after the
//! adjunction decision at the node) and `Dot(k)` (the first `k` children of
//! a node recognized). Spans are token offsets; `foot` is the span below
//! the foot node of an auxiliary tree when the item dominates it.

use std::collections::HashMap;

use crate::anchoring::AnchoredTree;
use crate::dsl::Mark;
use crate::featstruct::Atom;
use crate::treesolver::TreeKind;

pub(crate) type Span = (u8, u8);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Kind {
    Dot(u16),
    Bot,
    Top,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Item {
    pub inst: u32,
    pub node: u16,
    pub kind: Kind,
    pub i: u8,
    pub j: u8,
    pub foot: Option<Span>,
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Back {
    /// Anchor, empty leaf or foot.
    Leaf,
    Coanchor(u8),
    Subst(usize),
    Null(usize),
    Adjoin { bot: usize, aux: usize },
    First(usize),
    Next { dot: usize, child: usize },
    Complete(usize),
}

pub(crate) struct Instance<'a> {
    pub pos: usize,
    pub tree: &'a AnchoredTree,
}

pub(crate) struct Chart<'a> {
    pub insts: Vec<Instance<'a>>,
    pub items: Vec<Item>,
    pub backs: Vec<Vec<Back>>,
    pub goals: Vec<usize>,
    index: HashMap<Item, usize>,
    agenda: Vec<usize>,
    dots_by_end: HashMap<(u32, u16, u16, u8), Vec<usize>>,
    tops_by_start: HashMap<(u32, u16, u8), Vec<usize>>,
    bots_by_span: HashMap<(u8, u8, &'a Atom), Vec<usize>>,
    aux_by_foot: HashMap<(u8, u8, &'a Atom), Vec<usize>>,
    subst_sites: HashMap<&'a Atom, Vec<(u32, u16)>>,
    n: u8,
    start: &'a Atom,
}

fn join_feet(a: Option<Span>, b: Option<Span>) -> Option<Option<Span>> {
    match (a, b) {
        (Some(_), Some(_)) => None,
        (x, None) | (None, x) => Some(x),
    }
}

impl<'a> Chart<'a> {
    pub fn build(tokens: &[&str], anchored: &'a [Vec<AnchoredTree>], start: &'a Atom) -> Self {
        assert!(tokens.len() < u8::MAX as usize, "sentence too long");
        let n = tokens.len() as u8;
        let insts: Vec<Instance<'a>> = anchored
            .iter()
            .enumerate()
            .flat_map(|(pos, ts)| ts.iter().map(move |tree| Instance { pos, tree }))
            .collect();
        let mut chart = Chart {
            insts: Vec::new(),
            items: Vec::new(),
            backs: Vec::new(),
            goals: Vec::new(),
            index: HashMap::new(),
            agenda: Vec::new(),
            dots_by_end: HashMap::new(),
            tops_by_start: HashMap::new(),
            bots_by_span: HashMap::new(),
            aux_by_foot: HashMap::new(),
            subst_sites: HashMap::new(),
            n,
            start,
        };
        for (t, inst) in insts.iter().enumerate() {
            let t = t as u32;
            for (k, node) in inst.tree.tree.nodes.iter().enumerate() {
                let k = k as u16;
                let leaf = |i: u8, j: u8| Item { inst: t, node: k, kind: Kind::Bot, i, j, foot: None };
                match node.mark {
                    Mark::Anchor => {
                        let p = inst.pos as u8;
                        chart.add(leaf(p, p + 1), Back::Leaf);
                    }
                    Mark::Coanchor => {
                        let form = node.lex.as_deref().unwrap_or_default();
                        for (q, tok) in tokens.iter().enumerate() {
                            if *tok == form {
                                chart.add(leaf(q as u8, q as u8 + 1), Back::Coanchor(q as u8));
                            }
                        }
                    }
                    Mark::Foot => {
                        for i in 0..=n {
                            for j in i..=n {
                                let it = Item { inst: t, node: k, kind: Kind::Top, i, j, foot: Some((i, j)) };
                                chart.add(it, Back::Leaf);
                            }
                        }
                    }
                    Mark::Subst => chart.subst_sites.entry(&node.cat).or_default().push((t, k)),
                    Mark::None if node.children.is_empty() => {
                        for i in 0..=n {
                            chart.add(leaf(i, i), Back::Leaf);
                        }
                    }
                    Mark::None => {}
                }
            }
        }
        chart.insts = insts;
        while let Some(x) = chart.agenda.pop() {
            chart.process(x);
        }
        chart
    }

    fn add(&mut self, it: Item, back: Back) {
        if let Some(&k) = self.index.get(&it) {
            self.backs[k].push(back);
            return;
        }
        let k = self.items.len();
        self.items.push(it);
        self.backs.push(vec![back]);
        self.index.insert(it, k);
        self.agenda.push(k);
    }

    fn tree(&self, inst: u32) -> &'a AnchoredTree {
        self.insts[inst as usize].tree
    }

    fn process(&mut self, x: usize) {
        let it = self.items[x];
        let tree = self.tree(it.inst);
        let node = &tree.tree.nodes[it.node as usize];
        match it.kind {
            Kind::Top if it.node == 0 => match (tree.tree.kind, it.foot) {
                (TreeKind::Initial, None) => {
                    if node.cat == *self.start && it.i == 0 && it.j == self.n {
                        self.goals.push(x);
                    }
                    let sites = self.subst_sites.get(&node.cat).cloned().unwrap_or_default();
                    for (t2, k2) in sites {
                        if t2 != it.inst {
                            let top = Item { inst: t2, node: k2, kind: Kind::Top, i: it.i, j: it.j, foot: None };
                            self.add(top, Back::Subst(x));
                        }
                    }
                }
                (TreeKind::Auxiliary, Some((k, l))) => {
                    self.aux_by_foot.entry((k, l, &node.cat)).or_default().push(x);
                    let hosts = self.bots_by_span.get(&(k, l, &node.cat)).cloned().unwrap_or_default();
                    for b in hosts {
                        let host = self.items[b];
                        if host.inst != it.inst {
                            let top = Item { kind: Kind::Top, i: it.i, j: it.j, ..host };
                            self.add(top, Back::Adjoin { bot: b, aux: x });
                        }
                    }
                }
                _ => {}
            },
            Kind::Top => {
                let parent = node.parent.expect("non-root node has a parent");
                let c = tree.tree.nodes[parent].children.iter().position(|&ch| ch == it.node as usize).unwrap();
                let parent = parent as u16;
                if c == 0 {
                    let dot = Item { node: parent, kind: Kind::Dot(1), ..it };
                    self.add(dot, Back::First(x));
                } else {
                    let dots = self.dots_by_end.get(&(it.inst, parent, c as u16, it.i)).cloned().unwrap_or_default();
                    for d in dots {
                        let di = self.items[d];
                        if let Some(foot) = join_feet(di.foot, it.foot) {
                            let dot = Item { kind: Kind::Dot(c as u16 + 1), j: it.j, foot, ..di };
                            self.add(dot, Back::Next { dot: d, child: x });
                        }
                    }
                }
                self.tops_by_start.entry((it.inst, it.node, it.i)).or_default().push(x);
            }
            Kind::Dot(c) => {
                if c as usize == node.children.len() {
                    self.add(Item { kind: Kind::Bot, ..it }, Back::Complete(x));
                } else {
                    let child = node.children[c as usize] as u16;
                    self.dots_by_end.entry((it.inst, it.node, c, it.j)).or_default().push(x);
                    let tops = self.tops_by_start.get(&(it.inst, child, it.j)).cloned().unwrap_or_default();
                    for tp in tops {
                        let ti = self.items[tp];
                        if let Some(foot) = join_feet(it.foot, ti.foot) {
                            let dot = Item { kind: Kind::Dot(c + 1), j: ti.j, foot, ..it };
                            self.add(dot, Back::Next { dot: x, child: tp });
                        }
                    }
                }
            }
            Kind::Bot => {
                self.add(Item { kind: Kind::Top, ..it }, Back::Null(x));
                self.bots_by_span.entry((it.i, it.j, &node.cat)).or_default().push(x);
                let auxs = self.aux_by_foot.get(&(it.i, it.j, &node.cat)).cloned().unwrap_or_default();
                for a in auxs {
                    let ai = self.items[a];
                    if ai.inst != it.inst {
                        let top = Item { kind: Kind::Top, i: ai.i, j: ai.j, ..it };
                        self.add(top, Back::Adjoin { bot: x, aux: a });
                    }
                }
            }
        }
    }
}
